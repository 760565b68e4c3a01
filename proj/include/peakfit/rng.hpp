#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace peakfit::rng {

// Counter-based random numbers (Philox 2x64). Every draw is a pure
// function of (key, counter), so replications can run on any number of
// threads and still produce identical streams.

namespace detail {

inline std::pair<std::uint64_t, std::uint64_t> mulhilo(std::uint64_t a,
                                                       std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
}

}  // namespace detail

// One Philox 2x64-10 block: two 64-bit words from (key, counter).
inline std::pair<std::uint64_t, std::uint64_t> philox2x64(
    std::uint64_t key, std::uint64_t counter) {
  constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ULL;
  constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;
  std::uint64_t c0 = counter;
  std::uint64_t c1 = 0;
  std::uint64_t k = key;
  for (int round = 0; round < 10; ++round) {
    const auto [hi, lo] = detail::mulhilo(kMultiplier, c0);
    c0 = hi ^ k ^ c1;
    c1 = lo;
    k += kWeyl;
  }
  return {c0, c1};
}

inline double to_unit(std::uint64_t bits) {
  // 53 mantissa bits -> [0, 1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform draw in [0, 1) for stream `key` at position `counter`.
inline double uniform01(std::uint64_t key, std::uint64_t counter) {
  return to_unit(philox2x64(key, counter).first);
}

// Standard normal draw for stream `key` at position `counter` (Box-Muller).
inline double normal(std::uint64_t key, std::uint64_t counter) {
  const auto [a, b] = philox2x64(key, counter);
  const double u1 = to_unit(a);
  const double u2 = to_unit(b);
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));  // u1 < 1 always
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return radius * std::cos(kTwoPi * u2);
}

}  // namespace peakfit::rng
