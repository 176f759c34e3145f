#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace qcdiff {

/// Deterministic 64-bit generator (splitmix64). Streams derived with
/// derive()/derive_seed() are statistically independent of the parent and of
/// each other, which is what makes per-item corpus generation and per-image
/// sampling reproducible regardless of execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [0, n). Rejection sampling, exactly uniform.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = -n % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  /// Standard normal via Box-Muller; the paired draw is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 =
        static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Seed for a child stream; pure function of (construction seed, key).
  std::uint64_t derive_seed(std::uint64_t key) const {
    return mix(root_ ^ mix(key + 0xA0761D6478BD642Full));
  }
  std::uint64_t derive_seed(std::string_view label) const {
    return derive_seed(fnv1a(label));
  }
  Rng derive(std::uint64_t key) const { return Rng(derive_seed(key)); }
  Rng derive(std::string_view label) const { return Rng(derive_seed(label)); }

  std::uint64_t root_seed() const { return root_; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001B3ull;
    }
    return h;
  }

 private:
  std::uint64_t root_;
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qcdiff
