#pragma once

#include "ringct/geometry.hpp"
#include "ringct/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace ringct::test {

inline std::vector<double> uniform_vector(std::size_t n, double lo, double hi, std::uint64_t seed,
                                          std::uint32_t stream = 0) {
  CounterRng rng(seed, StreamDomain::test, stream);
  std::vector<double> out(n);
  for (double& x : out) x = lo + (hi - lo) * rng.uniform();
  return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  double num = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) num += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(num) / std::max(norm(b), 1e-300);
}

/// Dense system matrix assembled from unit images.
inline Eigen::MatrixXd dense_matrix(const Projector& A) {
  const std::size_t n = A.image_size();
  const std::size_t m = A.sinogram_size();
  Eigen::MatrixXd M(m, n);
  std::vector<double> e(n, 0.0), col(m);
  for (std::size_t k = 0; k < n; ++k) {
    e[k] = 1.0;
    A.forward(e, col);
    for (std::size_t i = 0; i < m; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = col[i];
    e[k] = 0.0;
  }
  return M;
}

/// Poisson-like integer counts with a given mean, drawn from the library
/// sampler on the test stream.
inline Sinogram random_counts(std::size_t r, std::size_t p, std::span<const double> mean,
                              std::uint64_t seed) {
  Sinogram s = Sinogram::zeros(r, p, SinogramKind::counts);
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    CounterRng rng(seed, StreamDomain::test, static_cast<std::uint32_t>(k), 7);
    s.values[k] = static_cast<double>(poisson(mean[k % mean.size()], rng));
  }
  return s;
}

} // namespace ringct::test
