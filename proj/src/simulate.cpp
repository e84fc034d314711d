#include "ringct/simulate.hpp"

#include "ringct/errors.hpp"
#include "ringct/rng.hpp"

#include <cmath>

namespace ringct {

FlatFieldTruth sample_flatfield_truth(double intensity, std::size_t detectors, std::uint64_t seed) {
  if (!(intensity > 0.0)) throw InvalidArgument("source intensity must be positive");
  FlatFieldTruth truth{std::vector<double>(detectors), intensity};
  for (std::size_t i = 0; i < detectors; ++i) {
    CounterRng rng(seed, StreamDomain::flatfield_truth, static_cast<std::uint32_t>(i));
    std::int64_t k = 0;
    while (k == 0) k = poisson(intensity, rng);
    truth.v[i] = static_cast<double>(k);
  }
  return truth;
}

FlatFieldTruth constant_flatfield(double omega, std::size_t detectors) {
  if (!(omega > 0.0)) throw InvalidArgument("flat-field intensity must be positive");
  return {std::vector<double>(detectors, omega), omega};
}

Sinogram sample_flats(const FlatFieldTruth& truth, std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("need at least one flat-field sample");
  const std::size_t r = truth.v.size();
  Sinogram f = Sinogram::zeros(r, samples, SinogramKind::counts);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < samples; ++k) {
      CounterRng rng(seed, StreamDomain::flats, static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>(k));
      f.at(i, k) = static_cast<double>(poisson(truth.v[i], rng));
    }
  return f;
}

Sinogram sample_counts(const FlatFieldTruth& truth, const Sinogram& line_integrals,
                       std::uint64_t seed) {
  if (line_integrals.detectors != truth.v.size())
    throw InvalidArgument("flat-field length differs from detector count");
  const std::size_t r = line_integrals.detectors;
  const std::size_t p = line_integrals.projections;
  Sinogram y = Sinogram::zeros(r, p, SinogramKind::counts);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      CounterRng rng(seed, StreamDomain::measurements, static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>(j));
      const double mean = truth.v[i] * std::exp(-line_integrals.at(i, j));
      y.at(i, j) = static_cast<double>(poisson(mean, rng));
    }
  return y;
}

Sinogram sample_measurements(const FlatFieldTruth& truth, const Geometry& geom,
                             const Image& img_fine, std::uint64_t seed) {
  if (img_fine.n != geom.forward_grid_n)
    throw InvalidArgument("simulation image must live on the forward grid");
  return sample_counts(truth, forward_project(geom.fine(), img_fine), seed);
}

} // namespace ringct
