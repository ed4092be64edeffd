#pragma once

#include <cstdint>

// Counter-based RNG: every draw is a pure function of (seed, stream, index),
// so sample i is the same no matter which thread evaluates it or in which
// order. Streams separate independent uses (x vs y coordinate, different
// experiments) without coordination.
namespace weyl_lab::rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed ^ 0x6A09E667F3BCC909ull);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ index);
  return h;
}

// uniform in [0,1)
inline double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return static_cast<double>(mix(seed, stream, index) >> 11) * 0x1.0p-53;
}

// uniform in [a,b)
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                      double a, double b) {
  return a + (b - a) * u01(seed, stream, index);
}

// Fixed stream ids. Keep them stable: changing one changes every seeded result.
namespace streams {
constexpr std::uint64_t shell_x = 11;
constexpr std::uint64_t shell_y = 12;
constexpr std::uint64_t bad_shell_x = 21;
constexpr std::uint64_t bad_shell_y = 22;
constexpr std::uint64_t proximity_arc = 31;
constexpr std::uint64_t proximity_angle = 32;
constexpr std::uint64_t proximity_radius = 33;
constexpr std::uint64_t proximity_side = 34;
constexpr std::uint64_t regions_x = 41;
constexpr std::uint64_t regions_y = 42;
constexpr std::uint64_t polygon_x = 51;
constexpr std::uint64_t polygon_y = 52;
constexpr std::uint64_t polygon_count = 53;
constexpr std::uint64_t lambda_pick = 61;
constexpr std::uint64_t lanczos = 71;
constexpr std::uint64_t gradient_x = 81;
constexpr std::uint64_t gradient_y = 82;
constexpr std::uint64_t partition_x = 91;
constexpr std::uint64_t partition_y = 92;
}  // namespace streams

}  // namespace weyl_lab::rng
