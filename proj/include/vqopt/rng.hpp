#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace vqopt {

/// Named random streams. Each (seed, stream) pair owns an independent engine.
enum class Stream : std::uint64_t { Init = 1, Axes = 2, Graph = 3, Test = 4 };

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// mt19937_64 seeded with splitmix64(seed) ^ splitmix64(stream). Uniform and
/// Gaussian draws are derived here rather than through <random>
/// distributions, whose output differs between standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream)
      : engine_(splitmix64(seed) ^ splitmix64(0x5eed0000ULL + static_cast<std::uint64_t>(stream))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  /// Standard normal by Box-Muller; one draw per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vqopt
