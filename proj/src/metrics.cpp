#include "ringct/metrics.hpp"

#include "ringct/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ringct {

std::vector<std::uint8_t> disk_mask(std::size_t n, double pixel_size, double radius, double cx,
                                    double cy) {
  const double half = 0.5 * static_cast<double>(n) * pixel_size;
  std::vector<std::uint8_t> mask(n * n, 0);
  for (std::size_t row = 0; row < n; ++row) {
    const double y = (static_cast<double>(row) + 0.5) * pixel_size - half - cy;
    for (std::size_t col = 0; col < n; ++col) {
      const double x = (static_cast<double>(col) + 0.5) * pixel_size - half - cx;
      mask[row * n + col] = x * x + y * y <= radius * radius ? 1 : 0;
    }
  }
  return mask;
}

double rae(std::span<const double> est, std::span<const double> truth,
           std::span<const std::uint8_t> mask) {
  if (est.size() != truth.size()) throw InvalidArgument("RAE: image sizes differ");
  if (!mask.empty() && mask.size() != truth.size()) throw InvalidArgument("RAE: mask size differs");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (!mask.empty() && !mask[k]) continue;
    const double e = est[k] - truth[k];
    num += e * e;
    den += truth[k] * truth[k];
  }
  if (den == 0.0) throw InvalidArgument("RAE: reference image is zero on the mask");
  return 100.0 * std::sqrt(num / den);
}

double rfe(std::span<const double> v_hat, std::span<const double> v) {
  if (v_hat.size() != v.size()) throw InvalidArgument("RFE: lengths differ");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw InvalidArgument("RFE: flat-field must be positive");
    num += (v_hat[i] - v[i]) * (v_hat[i] - v[i]);
    den += v[i] * v[i];
  }
  return 100.0 * std::sqrt(num / den);
}

namespace {

double frobenius(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

} // namespace

RingRatio ring_ratio(std::span<const double> candidate, std::span<const double> v_f,
                     std::span<const double> v, const Geometry& geom, const FilterConfig& cfg) {
  const double den = frobenius(stripe_image(geom, v, v_f, cfg).values);
  if (den == 0.0) return {std::numeric_limits<double>::quiet_NaN(), false};
  const double num = frobenius(stripe_image(geom, v, candidate, cfg).values);
  return {num / den, true};
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const auto radius = std::max<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double x = static_cast<double>(i);
    k[i + radius] = std::exp(-0.5 * x * x / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;
  return k;
}

// Separable Gaussian blur with replicate padding.
std::vector<double> blur(const std::vector<double>& img, std::size_t n,
                         const std::vector<double>& k) {
  const auto radius = static_cast<std::ptrdiff_t>(k.size() / 2);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  std::vector<double> tmp(n * n, 0.0);
  std::vector<double> out(n * n, 0.0);
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t col = 0; col < n; ++col) {
      double s = 0.0;
      for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
        const std::ptrdiff_t c = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(col) + d, 0, last);
        s += k[d + radius] * img[row * n + static_cast<std::size_t>(c)];
      }
      tmp[row * n + col] = s;
    }
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t col = 0; col < n; ++col) {
      double s = 0.0;
      for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
        const std::ptrdiff_t r = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(row) + d, 0, last);
        s += k[d + radius] * tmp[static_cast<std::size_t>(r) * n + col];
      }
      out[row * n + col] = s;
    }
  return out;
}

} // namespace

double ssim(const Image& a, const Image& b, double gaussian_sigma, double dynamic_range,
            std::span<const std::uint8_t> mask) {
  if (a.n != b.n || a.values.size() != b.values.size()) throw InvalidArgument("SSIM: sizes differ");
  if (!(gaussian_sigma > 0.0)) throw InvalidArgument("SSIM: sigma must be positive");
  if (!(dynamic_range > 0.0)) throw InvalidArgument("SSIM: dynamic range must be positive");
  if (!mask.empty() && mask.size() != a.values.size()) throw InvalidArgument("SSIM: mask size differs");
  const std::size_t n = a.n;
  const std::vector<double> k = gaussian_kernel(gaussian_sigma);
  std::vector<double> aa(n * n), bb(n * n), ab(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    aa[i] = a.values[i] * a.values[i];
    bb[i] = b.values[i] * b.values[i];
    ab[i] = a.values[i] * b.values[i];
  }
  const std::vector<double> mu_a = blur(a.values, n, k);
  const std::vector<double> mu_b = blur(b.values, n, k);
  const std::vector<double> s_aa = blur(aa, n, k);
  const std::vector<double> s_bb = blur(bb, n, k);
  const std::vector<double> s_ab = blur(ab, n, k);
  const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n * n; ++i) {
    if (!mask.empty() && !mask[i]) continue;
    const double va = s_aa[i] - mu_a[i] * mu_a[i];
    const double vb = s_bb[i] - mu_b[i] * mu_b[i];
    const double cov = s_ab[i] - mu_a[i] * mu_b[i];
    sum += (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2) /
           ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
    ++count;
  }
  if (count == 0) throw InvalidArgument("SSIM: empty mask");
  return sum / static_cast<double>(count);
}

} // namespace ringct
