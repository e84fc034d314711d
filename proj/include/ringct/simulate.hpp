#pragma once

#include "ringct/geometry.hpp"

#include <cstdint>
#include <vector>

namespace ringct {

/// Effective per-detector intensity v_i = eta_i * I0 (photons).
struct FlatFieldTruth {
  std::vector<double> v;
  double intensity = 0.0;
};

/// Counts of the scan (Y, r x p) and of the flat-field exposures (F, r x s).
/// Both are stored as detector-major count matrices.
struct MeasurementSet {
  Sinogram counts;
  Sinogram flats;
  std::size_t flat_samples = 0;
  std::uint64_t seed = 0;
};

/// v_i ~ Poisson(I0), redrawn until positive.
FlatFieldTruth sample_flatfield_truth(double intensity, std::size_t detectors, std::uint64_t seed);

/// v = omega * 1.
FlatFieldTruth constant_flatfield(double omega, std::size_t detectors);

/// f_ik ~ Poisson(v_i), k = 0..s-1.
Sinogram sample_flats(const FlatFieldTruth& truth, std::size_t samples, std::uint64_t seed);

/// y_ij ~ Poisson(v_i exp(-l_ij)) for given line integrals l.
Sinogram sample_counts(const FlatFieldTruth& truth, const Sinogram& line_integrals,
                       std::uint64_t seed);

/// Projects img_fine on the simulation grid (geom.forward_grid_n) and draws
/// the transmission counts.
Sinogram sample_measurements(const FlatFieldTruth& truth, const Geometry& geom,
                             const Image& img_fine, std::uint64_t seed);

} // namespace ringct
