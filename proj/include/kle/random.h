#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace kle {

/// Stream labels for the independent parts of one coefficient sample.
enum class StreamLabel : std::uint64_t {
  positive_jumps = 0x706f736974697665ULL,
  negative_jumps = 0x6e65676174697665ULL,
  gaussian = 0x6761757373696e6eULL,
  sample = 0x73616d706c652d69ULL,
};

/// One step of splitmix64; advances `state`.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for an engine dedicated to `label` under `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, StreamLabel label) {
  std::uint64_t s = seed ^ static_cast<std::uint64_t>(label);
  return splitmix64(s);
}

/// Seed of the index-th Monte Carlo sample under a base seed.
inline std::uint64_t sample_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t s = derive_seed(base, StreamLabel::sample) + index * 0x9e3779b97f4a7c15ULL;
  return splitmix64(s);
}

/// [0, 1) from the top 53 bits.
inline double to_unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// (0, 1) from the top 53 bits; never 0 or 1.
inline double to_open_unit_interval(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal variate addressed by (seed, counter); Box-Muller on a
/// counter-derived pair so any coordinate can be regenerated on its own.
inline double standard_normal_at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t s = seed ^ (counter * 0xd1b54a32d192ed03ULL);
  const double u1 = to_open_unit_interval(splitmix64(s));
  const double u2 = to_unit_interval(splitmix64(s));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace kle
