#pragma once

#include <cstdint>
#include <random>

namespace spinner {

/// 64-bit Mersenne Twister with distribution helpers defined here rather than
/// through <random>'s distributions, whose output is implementation-defined.
/// Streams are therefore reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Independent stream keyed by (seed, stream, step). Used for per-worker,
  /// per-superstep randomness.
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t step);

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  bool bernoulli(double p) { return uniform01() < p; }

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace spinner
