#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace tryon {

// Deterministic RNG built on mt19937_64 with explicit value mappings.
// std::uniform_*_distribution output is implementation-defined, so every
// draw here goes through fixed bit arithmetic instead; streams are
// bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0,1) with 53 bits of mantissa.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n). Modulo bias is below 2^-40 for any n < 2^24.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  // Marsaglia polar method with cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stable 64-bit FNV-1a over a string; used to derive independent
// per-name RNG streams from one master seed.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline Rng sub_rng(std::uint64_t seed, std::string_view stream) {
  return Rng(seed ^ fnv1a(stream));
}

inline Rng sub_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  // SplitMix64-style mix so nearby (a,b) pairs give unrelated streams.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (a + 1) + 0x85ebca6b0f24d3cdull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return Rng(z ^ (z >> 31));
}

}  // namespace tryon
