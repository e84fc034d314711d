#include "ringct/fbp.hpp"

#include "ringct/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

namespace ringct {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void check_sinogram(const Geometry& geom, const Sinogram& sino) {
  if (sino.kind == SinogramKind::counts)
    throw InvalidArgument("FBP needs line integrals, not raw counts");
  if (sino.detectors != geom.detectors || sino.projections != geom.projections)
    throw InvalidArgument("sinogram does not match geometry");
}

struct FftBuffers {
  explicit FftBuffers(std::size_t n) : n(n) {
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec, FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real, FFTW_ESTIMATE);
  }
  ~FftBuffers() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(forward);
      fftw_destroy_plan(inverse);
    }
    fftw_free(real);
    fftw_free(spec);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;

  std::size_t n;
  double* real;
  fftw_complex* spec;
  fftw_plan forward;
  fftw_plan inverse;
};

double interpolate_row(std::span<const double> row, double pos) {
  const double last = static_cast<double>(row.size() - 1);
  if (!(pos >= 0.0) || pos > last) return 0.0;
  const auto i0 = static_cast<std::size_t>(pos);
  if (i0 + 1 >= row.size()) return row[i0];
  const double w = pos - static_cast<double>(i0);
  return (1.0 - w) * row[i0] + w * row[i0 + 1];
}

double angle_weight(const Geometry& geom) {
  // pi/p for an equispaced half turn; a full turn sees every line twice over 2pi.
  return std::numbers::pi / static_cast<double>(geom.projections);
}

} // namespace

void FilterConfig::validate() const {
  if (!(epsilon >= 0.0)) throw InvalidArgument("filter epsilon must be nonnegative");
  if (zero_pad_factor < 2) throw InvalidArgument("zero_pad_factor must be at least 2");
}

Sinogram filter_sinogram(const Geometry& geom, const Sinogram& sino, const FilterConfig& cfg) {
  cfg.validate();
  check_sinogram(geom, sino);
  const std::size_t r = geom.detectors;
  const std::size_t p = geom.projections;
  const std::size_t n = cfg.zero_pad_factor * next_pow2(r);
  const double dt = geom.detector_spacing();

  std::vector<double> h(n / 2 + 1);
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double zeta = static_cast<double>(k) / (static_cast<double>(n) * dt);
    h[k] = zeta * std::exp(-2.0 * std::numbers::pi * cfg.epsilon * zeta) / static_cast<double>(n);
  }

  FftBuffers fft(n);
  Sinogram out = Sinogram::zeros(r, p, sino.kind);
  for (std::size_t j = 0; j < p; ++j) {
    std::fill(fft.real, fft.real + n, 0.0);
    for (std::size_t i = 0; i < r; ++i) fft.real[i] = sino.at(i, j);
    fftw_execute(fft.forward);
    for (std::size_t k = 0; k < h.size(); ++k) {
      fft.spec[k][0] *= h[k];
      fft.spec[k][1] *= h[k];
    }
    fftw_execute(fft.inverse);
    for (std::size_t i = 0; i < r; ++i) out.at(i, j) = fft.real[i];
  }
  return out;
}

std::vector<double> fbp_at_points(const Geometry& geom, const Sinogram& sino,
                                  const FilterConfig& cfg, std::span<const double> x,
                                  std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("point coordinate lengths differ");
  const Sinogram q = filter_sinogram(geom, sino, cfg);
  const std::size_t r = geom.detectors;
  const std::size_t p = geom.projections;
  const double t_first = geom.detector_offset(0);
  const double dt = geom.detector_spacing();

  // angle-major copy so each backprojected view reads one contiguous row
  std::vector<double> rows(r * p);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < p; ++j) rows[j * r + i] = q.at(i, j);

  std::vector<double> out(x.size(), 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const double c = std::cos(geom.angles[j]);
    const double s = std::sin(geom.angles[j]);
    const std::span<const double> row(rows.data() + j * r, r);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double t = x[k] * c + y[k] * s;
      out[k] += interpolate_row(row, (t - t_first) / dt);
    }
  }
  const double w = angle_weight(geom);
  for (double& v : out) v *= w;
  return out;
}

Image fbp(const Geometry& geom, const Sinogram& sino, const FilterConfig& cfg) {
  Image img = Image::zeros_like(geom);
  const std::size_t n = img.n;
  std::vector<double> xs(n * n);
  std::vector<double> ys(n * n);
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t col = 0; col < n; ++col) {
      xs[row * n + col] = img.center(col);
      ys[row * n + col] = img.center(row);
    }
  img.values = fbp_at_points(geom, sino, cfg, xs, ys);
  return img;
}

Sinogram stripe_sinogram(const Geometry& geom, std::span<const double> v,
                         std::span<const double> v_hat) {
  if (v.size() != geom.detectors || v_hat.size() != geom.detectors)
    throw InvalidArgument("flat-field length differs from detector count");
  Sinogram s = Sinogram::zeros_like(geom, SinogramKind::log_ratio);
  for (std::size_t i = 0; i < geom.detectors; ++i) {
    if (!(v[i] > 0.0)) throw InvalidArgument("stripe image needs a positive flat-field");
    const double rel = (v_hat[i] - v[i]) / v[i];
    for (std::size_t j = 0; j < geom.projections; ++j) s.at(i, j) = rel;
  }
  return s;
}

Image stripe_image(const Geometry& geom, std::span<const double> v, std::span<const double> v_hat,
                   const FilterConfig& cfg) {
  return fbp(geom, stripe_sinogram(geom, v, v_hat), cfg);
}

namespace {

void check_profile(const RingProfile& prof) {
  if (!(prof.epsilon > 0.0)) throw InvalidArgument("ring profile needs epsilon > 0");
}

std::complex<double> sigma_of(const RingProfile& prof) { return {prof.epsilon, prof.t0}; }

double branch_angle(const RingProfile& prof, int k) {
  return 0.4 * std::arg(sigma_of(prof)) + (2.0 * k - 1.0) * std::numbers::pi / 5.0;
}

} // namespace

double radial_profile(double rho, const RingProfile& prof) {
  check_profile(prof);
  const std::complex<double> sigma = sigma_of(prof);
  const std::complex<double> w = sigma * sigma + rho * rho;
  return std::real(sigma * std::pow(w, -1.5)) / (2.0 * std::numbers::pi);
}

double radial_profile_derivative(double rho, const RingProfile& prof) {
  check_profile(prof);
  const std::complex<double> sigma = sigma_of(prof);
  const std::complex<double> w = sigma * sigma + rho * rho;
  return -3.0 * rho * std::real(sigma * std::pow(w, -2.5)) / (2.0 * std::numbers::pi);
}

double extremum_value(const RingProfile& prof, int k) {
  check_profile(prof);
  if (prof.t0 == 0.0) throw DegenerateInput("ring profile extrema need t0 != 0");
  const std::complex<double> sigma = sigma_of(prof);
  // principal argument of sigma^2 + rho^2, which fixes the branch of the 3/2 power
  const double phi = std::remainder(branch_angle(prof, k), 2.0 * std::numbers::pi);
  const double c = 1.0 / std::tan(phi);
  const double scale = std::pow(1.0 + c * c, 0.75) *
                       std::pow(2.0 * prof.epsilon * std::abs(prof.t0), 1.5);
  return std::abs(sigma) * std::cos(std::arg(sigma) - 1.5 * phi) /
         (2.0 * std::numbers::pi * scale);
}

std::vector<Extremum> profile_extrema(const RingProfile& prof) {
  check_profile(prof);
  if (prof.t0 == 0.0) throw DegenerateInput("ring profile extrema need t0 != 0");
  const double eps = prof.epsilon;
  const double t0 = prof.t0;
  std::vector<Extremum> out{{0, 0.0, radial_profile(0.0, prof)}};
  for (int k = 1; k <= 5; ++k) {
    const double phi = branch_angle(prof, k);
    const double c = 1.0 / std::tan(phi);
    const double rho2 = 2.0 * eps * t0 * c + t0 * t0 - eps * eps;
    if (!(rho2 >= 0.0)) continue;
    // tan has period pi; keep the branch whose angle is the actual arg(w)
    const std::complex<double> w{eps * eps - t0 * t0 + rho2, 2.0 * eps * t0};
    const double diff = std::remainder(std::arg(w) - phi, 2.0 * std::numbers::pi);
    if (std::abs(diff) > 1e-9) continue;
    out.push_back({k, std::sqrt(rho2), extremum_value(prof, k)});
  }
  std::sort(out.begin() + 1, out.end(),
            [](const Extremum& a, const Extremum& b) { return a.rho < b.rho; });
  return out;
}

std::vector<EnvelopePoint> envelope(double epsilon, std::span<const double> t0_grid) {
  std::vector<EnvelopePoint> out;
  out.reserve(t0_grid.size());
  for (double t0 : t0_grid) {
    const std::vector<Extremum> ext = profile_extrema({t0, epsilon});
    EnvelopePoint pt{t0, ext.front().value, ext.front().value};
    for (const Extremum& e : ext) {
      pt.max = std::max(pt.max, e.value);
      pt.min = std::min(pt.min, e.value);
    }
    out.push_back(pt);
  }
  return out;
}

} // namespace ringct
