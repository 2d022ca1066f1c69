#pragma once

// Portable seeded randomness: mt19937_64 (fully specified by the standard)
// with one stream per (seed, stream id) derived through SplitMix64, and
// distributions implemented here because the standard library's are not
// reproducible across implementations.

#include <cstdint>
#include <random>

namespace acrp {

/// One SplitMix64 step: advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer on [lo, hi] (inclusive), unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace acrp
