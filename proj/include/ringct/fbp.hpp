#pragma once

#include "ringct/geometry.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ringct {

/// Apodized ramp |zeta| exp(-2 pi epsilon |zeta|), zeta in cycles per unit of
/// the detector coordinate. Rows are zero-padded to
/// zero_pad_factor * nextpow2(r) samples before filtering.
struct FilterConfig {
  double epsilon = 0.0;
  std::size_t zero_pad_factor = 2;

  void validate() const;
};

/// Ramp-filtered copy of a line-integral sinogram (same layout).
Sinogram filter_sinogram(const Geometry& geom, const Sinogram& sino, const FilterConfig& cfg);

/// Filtered backprojection on the geom.grid_n grid. Counts sinograms are
/// rejected.
Image fbp(const Geometry& geom, const Sinogram& sino, const FilterConfig& cfg);

/// FBP evaluated at arbitrary points (x[k], y[k]).
std::vector<double> fbp_at_points(const Geometry& geom, const Sinogram& sino,
                                  const FilterConfig& cfg, std::span<const double> x,
                                  std::span<const double> y);

/// Relative stripe sinogram (v_hat_i - v_i) / v_i, constant along each row.
Sinogram stripe_sinogram(const Geometry& geom, std::span<const double> v,
                         std::span<const double> v_hat);

/// psi_v(v_hat) = FBP of the stripe sinogram.
Image stripe_image(const Geometry& geom, std::span<const double> v, std::span<const double> v_hat,
                   const FilterConfig& cfg);

/// Ring left in an apodized FBP by a unit stripe at detector coordinate t0.
struct RingProfile {
  double t0 = 0.0;
  double epsilon = 0.0;
};

/// mu(rho) = Re(sigma (sigma^2 + rho^2)^{-3/2}) / (2 pi), sigma = eps + i t0.
double radial_profile(double rho, const RingProfile& prof);
double radial_profile_derivative(double rho, const RingProfile& prof);

struct Extremum {
  int k = 0; // 0 for rho = 0, otherwise the branch index 1..5
  double rho = 0.0;
  double value = 0.0;
};

/// Critical points of the profile on rho >= 0, starting with rho = 0 and then
/// sorted by rho. Throws DegenerateInput for t0 = 0.
std::vector<Extremum> profile_extrema(const RingProfile& prof);

/// Closed-form profile value at the critical point of branch k.
double extremum_value(const RingProfile& prof, int k);

struct EnvelopePoint {
  double t0 = 0.0;
  double max = 0.0;
  double min = 0.0;
};

std::vector<EnvelopePoint> envelope(double epsilon, std::span<const double> t0_grid);

} // namespace ringct
