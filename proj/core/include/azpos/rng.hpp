// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace azpos {

// Counter-based SplitMix64 stream (Steele/Lea/Flood) so that every draw is a
// pure function of (seed, counter). All randomness in the library goes through
// this generator; results are reproducible for a given seed on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via Box-Muller; draws are cached pairwise.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  // Circularly symmetric complex normal with unit total variance.
  std::complex<double> next_cgaussian() {
    constexpr double inv_sqrt2 = 0.7071067811865476;
    double re = next_gaussian();
    double im = next_gaussian();
    return {re * inv_sqrt2, im * inv_sqrt2};
  }

 private:
  uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Derives an independent child seed from a base seed and up to three indices.
inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  SplitMix64 g(base ^ (a * 0xA24BAED4963EE407ull) ^ (b * 0x9FB21C651E98DF25ull) ^
               (c * 0xD6E8FEB86659FD93ull));
  return g.next_u64();
}

// FNV-1a, used to fold station labels into seed derivations.
inline uint64_t hash_label(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace azpos
