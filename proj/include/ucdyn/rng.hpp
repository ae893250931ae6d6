#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ucdyn {

// Counter-based substreams: every random draw is a pure function of a key such as
// (master_seed, rep, step, user), so results never depend on evaluation order.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::initializer_list<std::uint64_t> key) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (std::uint64_t k : key) h = splitmix64(h ^ splitmix64(k));
  return h;
}

/// Maps 64 random bits to [0, 1) with 53-bit resolution.
constexpr double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Tags separating the purposes a substream key can serve.
enum class StreamTag : std::uint64_t { Init = 1, Sample = 2, Oracle = 3 };

}  // namespace ucdyn
