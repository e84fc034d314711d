#include "ringct/geometry.hpp"

#include "ringct/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace ringct {

namespace {

constexpr double kParallelEps = 1e-15;

struct Ray {
  double x0, y0; // foot point t * n
  double dx, dy; // unit direction
};

Ray make_ray(double angle, double t) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {t * c, t * s, -s, c};
}

// Parameter interval [lo, hi] of the ray inside [-half, half]^2.
bool clip_to_square(const Ray& ray, double half, double& lo, double& hi) {
  lo = -std::numeric_limits<double>::infinity();
  hi = std::numeric_limits<double>::infinity();
  const double p0[2] = {ray.x0, ray.y0};
  const double d[2] = {ray.dx, ray.dy};
  for (int a = 0; a < 2; ++a) {
    if (std::abs(d[a]) < kParallelEps) {
      if (std::abs(p0[a]) > half) return false;
      continue;
    }
    double l1 = (-half - p0[a]) / d[a];
    double l2 = (half - p0[a]) / d[a];
    if (l1 > l2) std::swap(l1, l2);
    lo = std::max(lo, l1);
    hi = std::min(hi, l2);
  }
  return hi > lo;
}

// Parameters of the grid-line crossings along one axis strictly inside (lo, hi),
// appended in increasing order.
void axis_crossings(double p0, double d, double half, double h, std::size_t n, double lo, double hi,
                    std::vector<double>& out) {
  out.clear();
  if (std::abs(d) < kParallelEps) return;
  const double a = p0 + lo * d;
  const double b = p0 + hi * d;
  const double cmin = std::min(a, b);
  const double cmax = std::max(a, b);
  auto kmin = static_cast<long>(std::ceil((cmin + half) / h));
  auto kmax = static_cast<long>(std::floor((cmax + half) / h));
  kmin = std::max(kmin, 0L);
  kmax = std::min(kmax, static_cast<long>(n));
  for (long k = kmin; k <= kmax; ++k) {
    const double lam = (-half + static_cast<double>(k) * h - p0) / d;
    if (lam > lo && lam < hi) out.push_back(lam);
  }
  if (d < 0) std::reverse(out.begin(), out.end());
}

// Siddon-style traversal: emits (pixel, length) for every pixel the ray
// crosses with positive length, in order along the ray.
template <class Emit>
void trace(const Ray& ray, double side, std::size_t n, Emit&& emit) {
  const double half = 0.5 * side;
  double lo = 0.0;
  double hi = 0.0;
  if (!clip_to_square(ray, half, lo, hi)) return;

  const double h = side / static_cast<double>(n);
  thread_local std::vector<double> xs, ys, all;
  axis_crossings(ray.x0, ray.dx, half, h, n, lo, hi, xs);
  axis_crossings(ray.y0, ray.dy, half, h, n, lo, hi, ys);
  all.resize(xs.size() + ys.size() + 2);
  all.front() = lo;
  std::merge(xs.begin(), xs.end(), ys.begin(), ys.end(), all.begin() + 1);
  all.back() = hi;

  const double min_len = 1e-12 * h;
  const auto last = static_cast<long>(n) - 1;
  for (std::size_t k = 0; k + 1 < all.size(); ++k) {
    const double len = all[k + 1] - all[k];
    if (len <= min_len) continue;
    const double mid = 0.5 * (all[k] + all[k + 1]);
    const double xm = ray.x0 + mid * ray.dx;
    const double ym = ray.y0 + mid * ray.dy;
    const long ix = std::clamp(static_cast<long>(std::floor((xm + half) / h)), 0L, last);
    const long iy = std::clamp(static_cast<long>(std::floor((ym + half) / h)), 0L, last);
    emit(static_cast<std::uint32_t>(iy * static_cast<long>(n) + ix), len);
  }
}

Ray ray_of(const Geometry& geom, std::size_t i, std::size_t j) {
  return make_ray(geom.angles[j], geom.detector_offset(i));
}

void check_ray_index(const Geometry& geom, std::size_t i, std::size_t j) {
  if (i >= geom.detectors || j >= geom.projections)
    throw InvalidArgument("ray index (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") out of range");
}

} // namespace

double Geometry::detector_offset(std::size_t i) const {
  return -0.5 * detector_width + (static_cast<double>(i) + 0.5) * detector_spacing();
}

Geometry Geometry::with_grid(std::size_t n) const {
  Geometry g = *this;
  g.grid_n = n;
  return g;
}

void Geometry::validate() const {
  if (detectors < 1 || projections < 1) throw InvalidArgument("geometry needs r >= 1 and p >= 1");
  if (angles.size() != projections) throw InvalidArgument("angle count differs from p");
  if (!(detector_width > 0.0)) throw InvalidArgument("detector_width must be positive");
  if (!(domain_side > 0.0)) throw InvalidArgument("domain_side must be positive");
  if (grid_n < 2) throw InvalidArgument("grid_n must be at least 2");
  for (std::size_t j = 0; j < angles.size(); ++j) {
    if (!(angles[j] >= 0.0 && angles[j] < 2.0 * std::numbers::pi))
      throw InvalidArgument("angles must lie in [0, 2pi)");
    if (j > 0 && !(angles[j] > angles[j - 1]))
      throw InvalidArgument("angles must be strictly increasing");
  }
}

Geometry build_parallel_geometry(std::size_t detectors, std::size_t projections,
                                 double detector_width, double domain_side, std::size_t grid_n,
                                 AngleSpan span, std::size_t forward_grid_n) {
  if (detectors == 0 || projections == 0 || grid_n == 0)
    throw InvalidArgument("geometry dimensions must be positive");
  if (!(detector_width > 0.0) || !(domain_side > 0.0))
    throw InvalidArgument("geometry lengths must be positive");

  Geometry g;
  g.detectors = detectors;
  g.projections = projections;
  g.detector_width = detector_width;
  g.domain_side = domain_side;
  g.grid_n = grid_n;
  g.forward_grid_n = forward_grid_n == 0 ? 2 * grid_n : forward_grid_n;
  const double total = span == AngleSpan::half ? std::numbers::pi : 2.0 * std::numbers::pi;
  g.angles.resize(projections);
  for (std::size_t j = 0; j < projections; ++j)
    g.angles[j] = total * static_cast<double>(j) / static_cast<double>(projections);
  g.validate();
  return g;
}

Image Image::zeros(std::size_t n, double pixel_size) {
  return Image{n, pixel_size, std::vector<double>(n * n, 0.0)};
}

double Image::center(std::size_t k) const {
  return -0.5 * pixel_size * static_cast<double>(n) + (static_cast<double>(k) + 0.5) * pixel_size;
}

Sinogram Sinogram::zeros(std::size_t r, std::size_t p, SinogramKind kind) {
  return Sinogram{r, p, kind, std::vector<double>(r * p, 0.0)};
}

std::vector<RayWeight> operator_row(const Geometry& geom, std::size_t i, std::size_t j) {
  check_ray_index(geom, i, j);
  std::vector<RayWeight> row;
  trace(ray_of(geom, i, j), geom.domain_side, geom.grid_n,
        [&](std::uint32_t pixel, double len) { row.push_back({pixel, len}); });
  return row;
}

double chord_length(const Geometry& geom, std::size_t i, std::size_t j) {
  check_ray_index(geom, i, j);
  double lo = 0.0;
  double hi = 0.0;
  if (!clip_to_square(ray_of(geom, i, j), 0.5 * geom.domain_side, lo, hi)) return 0.0;
  return hi - lo;
}

Projector::Projector(Geometry geom, Storage storage) : geom_(std::move(geom)), storage_(storage) {
  geom_.validate();
  if (storage_ == Storage::on_the_fly) return;

  const std::size_t p = geom_.projections;
  row_start_.reserve(geom_.rays() + 1);
  row_start_.push_back(0);
  for (std::size_t i = 0; i < geom_.detectors; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      trace(ray_of(geom_, i, j), geom_.domain_side, geom_.grid_n,
            [&](std::uint32_t pixel, double len) {
              pixels_.push_back(pixel);
              lengths_.push_back(len);
            });
      row_start_.push_back(pixels_.size());
    }
  }
  pixels_.shrink_to_fit();
  lengths_.shrink_to_fit();
}

void Projector::forward(std::span<const double> image, std::span<double> sino) const {
  if (image.size() != image_size() || sino.size() != sinogram_size())
    throw InvalidArgument("forward projection: size mismatch");
  if (storage_ == Storage::cached) {
    for (std::size_t ray = 0; ray < sino.size(); ++ray) {
      double acc = 0.0;
      for (std::size_t k = row_start_[ray]; k < row_start_[ray + 1]; ++k)
        acc += lengths_[k] * image[pixels_[k]];
      sino[ray] = acc;
    }
    return;
  }
  const std::size_t p = geom_.projections;
  for (std::size_t i = 0; i < geom_.detectors; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double acc = 0.0;
      trace(ray_of(geom_, i, j), geom_.domain_side, geom_.grid_n,
            [&](std::uint32_t pixel, double len) { acc += len * image[pixel]; });
      sino[i * p + j] = acc;
    }
}

void Projector::adjoint(std::span<const double> sino, std::span<double> image) const {
  if (image.size() != image_size() || sino.size() != sinogram_size())
    throw InvalidArgument("back projection: size mismatch");
  std::fill(image.begin(), image.end(), 0.0);
  if (storage_ == Storage::cached) {
    for (std::size_t ray = 0; ray < sino.size(); ++ray) {
      const double y = sino[ray];
      if (y == 0.0) continue;
      for (std::size_t k = row_start_[ray]; k < row_start_[ray + 1]; ++k)
        image[pixels_[k]] += lengths_[k] * y;
    }
    return;
  }
  const std::size_t p = geom_.projections;
  for (std::size_t i = 0; i < geom_.detectors; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const double y = sino[i * p + j];
      if (y == 0.0) continue;
      trace(ray_of(geom_, i, j), geom_.domain_side, geom_.grid_n,
            [&](std::uint32_t pixel, double len) { image[pixel] += len * y; });
    }
}

std::vector<double> Projector::forward(std::span<const double> image) const {
  std::vector<double> out(sinogram_size());
  forward(image, out);
  return out;
}

std::vector<double> Projector::adjoint(std::span<const double> sino) const {
  std::vector<double> out(image_size());
  adjoint(sino, out);
  return out;
}

Sinogram forward_project(const Geometry& geom, const Image& img) {
  if (img.n != geom.grid_n) throw InvalidArgument("image grid does not match geometry grid");
  Projector proj(geom, Projector::Storage::on_the_fly);
  Sinogram out = Sinogram::zeros_like(geom, SinogramKind::line_integrals);
  proj.forward(img.values, out.values);
  return out;
}

Image back_project(const Geometry& geom, const Sinogram& sino) {
  if (sino.detectors != geom.detectors || sino.projections != geom.projections)
    throw InvalidArgument("sinogram dimensions do not match geometry");
  Projector proj(geom, Projector::Storage::on_the_fly);
  Image out = Image::zeros_like(geom);
  proj.adjoint(sino.values, out.values);
  return out;
}

} // namespace ringct
