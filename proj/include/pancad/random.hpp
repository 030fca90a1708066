#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pancad {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a, used to derive per-drawing seeds.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t basis = 14695981039346656037ull) {
  std::uint64_t h = basis;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// splitmix64 finalizer; mixes a seed with a stream index.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// The helpers below avoid std::uniform_*_distribution, whose output differs
// between standard library implementations.

/// Uniform integer in [0, n).
template <class Engine>
std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Uniform real in [0, 1) with 53 random bits.
template <class Engine>
double uniform_real(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Engine>
double uniform_real(Engine& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_real(rng);
}

template <class Engine>
bool bernoulli(Engine& rng, double p) {
  return uniform_real(rng) < p;
}

}  // namespace pancad
