#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace tabcurate {

/// Purpose tags for random streams. Each (purpose, seed, sub) triple maps to an
/// independent engine state, so e.g. splitting and generation never share draws
/// even when they are given the same user seed.
enum class Stream : std::uint64_t {
  split = 0x73706c6974ULL,
  mock = 0x6d6f636bULL,
  smote = 0x736d6f7465ULL,
  kde = 0x6b6465ULL,
  curator = 0x637572ULL,
  downstream = 0x646f776eULL,
  bootstrap = 0x626f6f74ULL,
  llm = 0x6c6c6dULL,
};

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded generator: std::mt19937_64 (bit-exact by the standard) seeded through
/// SplitMix64 of (purpose, seed, sub). The distributions are implemented here
/// rather than with <random> distributions, whose output is implementation
/// defined, so draws are reproducible across standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream purpose, std::uint64_t sub = 0)
      : engine_(splitmix64(splitmix64(splitmix64(static_cast<std::uint64_t>(purpose)) ^ seed) ^ sub)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t draw = next();
    while (draw >= limit) draw = next();
    return static_cast<std::size_t>(draw % bound);
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tabcurate
