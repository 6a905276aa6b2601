#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace xtreval {

/// SplitMix64 finalizer; full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

/// Derives a stream key from a base seed and a tuple of ids (replicate,
/// cell, restart, ...). Parallel workers drawing from keys derived this way
/// produce results independent of scheduling order.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t k = mix64(seed + 0x9E3779B97F4A7C15ull);
  for (std::uint64_t id : ids) {
    k = mix64(k ^ (id + 0x9E3779B97F4A7C15ull + (k << 6) + (k >> 2)));
  }
  return k;
}

/// xoshiro256++ seeded from a derived key. Self-contained so that streams are
/// identical across platforms and standard libraries.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) {
    // Expand the key through SplitMix64, as recommended for xoshiro seeding.
    std::uint64_t s = key;
    for (auto& w : state_) {
      s += 0x9E3779B97F4A7C15ull;
      w = mix64(s);
    }
  }

  CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
      : CounterRng(derive_key(seed, ids)) {}

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in the open interval (0,1); never returns 0 or 1, so
  /// log(-log(u)) is always finite.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), unbiased (rejection sampling).
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape boosting for shape < 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace xtreval
