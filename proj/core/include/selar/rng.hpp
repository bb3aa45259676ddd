#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "selar/error.hpp"

namespace selar {

// Every random decision in a run flows from one root seed through named
// substreams, so components (init, sampler, split, label generation) draw
// from decoupled sequences and adding a consumer never shifts the others.

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 substream(uint64_t seed, std::string_view name) {
  return std::mt19937_64(splitmix64(seed ^ fnv1a64(name)));
}

// Unbiased index in [0, n) by masked rejection. Hand-rolled (not
// uniform_int_distribution) so sequences are identical across standard
// libraries.
inline uint64_t rand_index(std::mt19937_64& rng, uint64_t n) {
  if (n == 0) throw Error::contract("rand_index: empty range");
  uint64_t range = n - 1;
  uint64_t mask = ~0ull >> __builtin_clzll(range | 1);
  uint64_t x;
  do {
    x = rng() & mask;
  } while (x > range);
  return x;
}

// Uniform in [0, 1) with 53 bits of precision.
inline double rand_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double rand_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * rand_uniform(rng);
}

template <class T>
void shuffle_pinned(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rand_index(rng, i)]);
  }
}

// Fisher-Yates over the first k slots only; v is left with the k sampled
// elements in front.
template <class T>
void partial_shuffle(std::vector<T>& v, size_t k, std::mt19937_64& rng) {
  if (k > v.size()) throw Error::contract("partial_shuffle: k exceeds size");
  for (size_t i = 0; i < k; ++i) {
    std::swap(v[i], v[i + rand_index(rng, v.size() - i)]);
  }
}

}  // namespace selar
