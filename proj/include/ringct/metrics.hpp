#pragma once

#include "ringct/fbp.hpp"
#include "ringct/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ringct {

/// 1 for pixel centers within radius of (cx, cy), 0 elsewhere.
std::vector<std::uint8_t> disk_mask(std::size_t n, double pixel_size, double radius,
                                    double cx = 0.0, double cy = 0.0);

/// 100 ||est - truth|| / ||truth|| over the mask (all pixels when empty).
double rae(std::span<const double> est, std::span<const double> truth,
           std::span<const std::uint8_t> mask = {});

/// 100 ||v_hat - v|| / ||v||.
double rfe(std::span<const double> v_hat, std::span<const double> v);

struct RingRatio {
  double value = 0.0;
  bool defined = true; // false when psi_v(v_f) vanishes; value is then NaN
};

/// ||psi_v(candidate)||_F / ||psi_v(v_f)||_F.
RingRatio ring_ratio(std::span<const double> candidate, std::span<const double> v_f,
                     std::span<const double> v, const Geometry& geom, const FilterConfig& cfg);

/// Mean local SSIM with a Gaussian window of the given sigma (pixels),
/// averaged over the mask (all pixels when empty).
double ssim(const Image& a, const Image& b, double gaussian_sigma, double dynamic_range,
            std::span<const std::uint8_t> mask = {});

struct MetricReport {
  double rae = 0.0;
  double rfe = 0.0;
  double rr = 0.0;
  bool rr_defined = true;
  double ssim = 0.0;
};

} // namespace ringct
