#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ncorr::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent engine for stream (seed, a, b). Trials derive their own
/// streams from (seed, trial index) so results never depend on scheduling.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return std::mt19937_64(s);
}

/// Uniform in [0, bound). Power-of-two bounds use a mask, anything else is
/// rejection-sampled; both are unbiased and implementation-independent.
inline std::uint32_t uniform_below(std::mt19937_64& g, std::uint32_t bound) {
  if ((bound & (bound - 1)) == 0) {
    return static_cast<std::uint32_t>(g() & (bound - 1));
  }
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = g();
  } while (v >= limit);
  return static_cast<std::uint32_t>(v % bound);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (cosine branch only).
inline double standard_normal(std::mt19937_64& g) {
  const double u1 = 1.0 - uniform_unit(g);  // (0, 1]
  const double u2 = uniform_unit(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ncorr::rng
