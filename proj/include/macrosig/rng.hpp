#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace macrosig::rng {

// All randomness in the library flows through these helpers on top of
// std::mt19937_64, whose output sequence is fixed by the standard. The
// mapping from raw 64-bit words to doubles/indices is spelled out here
// instead of using std::*_distribution, so results are identical across
// standard-library implementations.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable derived seed for per-unit-of-work generators (tree b, fold f, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform in [0, 1), 53 random bits.
inline double next_unit(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1], safe as a log argument.
inline double next_unit_open(Engine& eng) {
  return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

inline double next_uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * next_unit(eng);
}

// Standard normal via Box-Muller. One draw consumes two engine words.
inline double next_normal(Engine& eng) {
  double u1 = next_unit_open(eng);
  double u2 = next_unit(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Unbiased integer in [0, n) by rejection on the top bits.
inline std::size_t next_index(Engine& eng, std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = next_index(eng, i);
    std::swap(v[i - 1], v[j]);
  }
}

// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<int> sample_without_replacement(Engine& eng, int n, int k) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> out;
  out.reserve(k);
  for (int i = 0; i < k && i < n; ++i) {
    std::size_t j = i + next_index(eng, n - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace macrosig::rng
