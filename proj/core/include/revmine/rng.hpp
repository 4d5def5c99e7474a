#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

// Deterministic randomness helpers. std::shuffle and the standard
// distributions are implementation-defined, so everything that must be
// reproducible across platforms goes through these instead. mt19937_64
// itself is fully pinned by the standard.

namespace revmine::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Stage-scoped seed derivation: one user-facing seed fans out into
// independent streams, so pipeline stages can be replayed in isolation.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stage) {
  std::uint64_t state = base ^ fnv1a(stage);
  return splitmix64(state);
}

inline std::mt19937_64 engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

// Unbiased draw in [0, bound) via masked rejection. bound must be > 0.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  if (bound <= 1) return 0;
  std::uint64_t mask = bound - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    std::uint64_t x = gen() & mask;
    if (x < bound) return x;
  }
}

// 53-bit uniform double in [0, 1).
inline double uniform_double(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Fisher-Yates, deterministic for a fixed engine state.
template <typename T>
void shuffle(std::vector<T>& values, std::mt19937_64& gen) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(gen, i));
    std::swap(values[i - 1], values[j]);
  }
}

inline std::vector<std::size_t> index_permutation(std::size_t n,
                                                  std::mt19937_64& gen) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  shuffle(idx, gen);
  return idx;
}

// Index draw from a cumulative weight table (last entry = total mass).
inline std::size_t categorical(std::span<const double> cumulative,
                               std::mt19937_64& gen) {
  double u = uniform_double(gen) * cumulative.back();
  std::size_t lo = 0;
  std::size_t hi = cumulative.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (u < cumulative[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

// Poisson by CDF inversion; deterministic, adequate for small means.
inline std::size_t poisson(double mean, std::mt19937_64& gen) {
  if (mean <= 0.0) return 0;
  double u = uniform_double(gen);
  double p = std::exp(-mean);
  double cdf = p;
  std::size_t k = 0;
  while (u > cdf && k < 100000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace revmine::rng
