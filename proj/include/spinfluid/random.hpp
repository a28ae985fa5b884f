#pragma once

#include <cstdint>

#include "spinfluid/fields.hpp"

namespace sf {

/// Counter-based generator: the n-th draw is a pure function of (seed, stream, n),
/// using the SplitMix64 finalizer as the mixing function.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static std::uint64_t mix(std::uint64_t z);
  std::uint64_t at(std::uint64_t counter) const;

  std::uint64_t next_u64() { return at(counter_++); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t counter() const { return counter_; }
  CounterRng substream(std::uint64_t k) const { return CounterRng(seed_, mix(stream_ + 0x9e3779b97f4a7c15ULL * (k + 1))); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

/// Real trigonometric polynomial with integer modes |n_a| <= kmax on active axes,
/// coefficients uniform in [-1,1] scaled by amplitude/(1+|n|^2). Zero mean.
ScalarField random_bandlimited(const Grid& g, CounterRng& rng, int kmax, double amplitude);
ComplexField random_bandlimited_complex(const Grid& g, CounterRng& rng, int kmax, double amplitude);

}  // namespace sf
