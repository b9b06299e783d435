#pragma once

// Portable random source for the synthetic benchmarks.
//
// Generator: xoshiro256** (Blackman & Vigna), state seeded from a 64-bit seed
// by four successive SplitMix64 outputs. Distributions are implemented here
// rather than taken from <random> because the standard library's
// distributions differ between implementations.
//
// Reference: seed 42 yields the first three outputs recorded in
// tests/fixtures/xoshiro256ss_seed42.txt.

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace ssa {

class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256ss(std::uint64_t seed);

  result_type operator()() noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (one draw per pair of uniforms).
  double normal() noexcept;
  /// Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// +1 or -1 with equal probability.
  double sign() noexcept { return ((*this)() >> 63) ? -1.0 : 1.0; }

 private:
  std::array<std::uint64_t, 4> state_{};
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// k distinct values from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(Xoshiro256ss& rng, std::size_t n, std::size_t k);

}  // namespace ssa
