#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

// Deterministic draw helpers on top of std::mt19937_64. The engine's output
// sequence is pinned by the standard; the std::*_distribution adaptors are
// not, so everything that must reproduce bit-for-bit across platforms draws
// through these instead.
namespace wowy::rng {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent stream seed for (seed, tag); used to give every simulated
/// game its own engine so games can be generated in any order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return splitmix64(splitmix64(seed) ^ fnv1a(tag));
}

/// Uniform integer in [0, n), unbiased via rejection. n must be > 0.
inline std::uint64_t bounded(Engine& eng, std::uint64_t n) {
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t v;
  do {
    v = eng();
  } while (v >= limit);
  return v % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return double(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

/// Exponential inter-arrival draw with the given rate (> 0).
inline double exponential(Engine& eng, double rate) {
  return -std::log1p(-uniform01(eng)) / rate;
}

/// Standard normal via Box-Muller (one value per call; the sine half is
/// discarded to keep the draw count predictable).
inline double normal(Engine& eng, double mean, double sd) {
  double u1 = 1.0 - uniform01(eng);  // (0, 1]
  double u2 = uniform01(eng);
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  return mean + sd * z;
}

/// Index drawn proportionally to non-negative weights; total must be > 0.
inline std::size_t weighted_pick(Engine& eng, std::span<const double> weights) {
  double total = 0;
  for (double w : weights) total += w;
  double x = uniform01(eng) * total;
  double acc = 0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (x < acc) return i;
  }
  return weights.size() - 1;
}

/// Fisher-Yates with pinned index draws (std::shuffle's draw pattern is
/// implementation-defined).
template <class T>
void shuffle(std::vector<T>& v, Engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = std::size_t(bounded(eng, i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

}  // namespace wowy::rng
