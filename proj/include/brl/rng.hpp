#pragma once

#include <cstdint>
#include <random>

namespace brl {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent sub-stream seed for chain/fold/replicate `index` of `stream`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Unbiased uniform draw from {0, ..., n-1}.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = ~0ull - ~0ull % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= bound);
  return static_cast<std::size_t>(v % n);
}

// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace brl
