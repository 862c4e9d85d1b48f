#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Reproducible random draws. Everything routes through std::mt19937_64 (the
// engine is pinned by the standard, so streams are identical across
// platforms) with explicit conversions instead of std::*_distribution, whose
// output is implementation-defined:
//   - uniform01: top 53 bits of one engine draw -> [0, 1)
//   - uniform_index: engine() % n (modulo bias < n / 2^64, negligible here)
//   - normal: Box-Muller on two uniform01 draws
// Streams are split with splitmix64 so that e.g. every (k, dataset) cell of a
// benchmark gets an independent, restartable sequence.

namespace snsm::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return splitmix64(splitmix64(base) ^ splitmix64(tag));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  return g() % n;
}

inline double normal(std::mt19937_64& g, double mean = 0.0, double stddev = 1.0) {
  double u1 = uniform01(g);
  double u2 = uniform01(g);
  while (u1 <= 0.0) u1 = uniform01(g);  // log(0) guard
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

}  // namespace snsm::rng
