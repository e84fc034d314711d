#pragma once

#include <array>
#include <cstdint>

namespace ringct {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11). Output is
/// a pure function of (counter, key), which makes streams reproducible on
/// every platform and independent of evaluation order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream tags so that different simulation quantities never share counters.
enum class StreamDomain : std::uint32_t {
  flatfield_truth = 1,
  flats = 2,
  measurements = 3,
  phantom = 4,
  power_iteration = 5,
  test = 99,
};

/// Uniform variates from the Philox stream keyed by a 64-bit seed and
/// addressed by (domain, a, b). Independent cells (i, j) use separate
/// streams, so results do not depend on traversal order or thread count.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, StreamDomain domain, std::uint32_t a = 0, std::uint32_t b = 0);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  std::uint32_t next_u32();

private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 4;
};

/// Exact Poisson variate: sequential inversion below mean 30, Hoermann's
/// PTRS transformed rejection otherwise. Means below 1e-300 return 0.
/// Throws InvalidArgument for negative or non-finite means.
std::int64_t poisson(double mean, CounterRng& rng);

} // namespace ringct
