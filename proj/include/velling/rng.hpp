#pragma once

// Counter-based 64-bit RNG (splitmix64). Each Monte Carlo trajectory gets its
// own stream keyed by (seed, trajectory index), so batch results do not
// depend on scheduling or worker count.

#include <cstdint>

namespace velling {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Stream seed for trajectory `index` under master `seed`.
inline SplitMix64 trajectory_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(splitmix64(splitmix64(seed) ^ index));
}

}  // namespace velling
