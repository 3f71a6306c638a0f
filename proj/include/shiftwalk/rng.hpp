#pragma once

#include <cstdint>
#include <random>

namespace shiftwalk {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic per-path substream: the stream depends only on (seed, index),
// never on thread scheduling, so parallel runs are byte-identical for a
// given seed regardless of thread count.
inline std::mt19937_64 path_rng(uint64_t seed, uint64_t index) {
  uint64_t s = splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  return std::mt19937_64(s);
}

inline double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa uniform in [0,1).
  return (rng() >> 11) * 0x1.0p-53;
}

}  // namespace shiftwalk
