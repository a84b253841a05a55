#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace relatron {

// Counter-based deterministic randomness. Every random quantity in the
// project is derived by hashing (seed, stream ids...) so that parallel and
// serial execution orders produce identical results and so draws can be
// re-created in isolation (e.g. one sketch coordinate) without generating
// the whole stream.

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
}  // namespace detail

// Mixes a seed with a list of stream identifiers into a single 64-bit key.
inline std::uint64_t derive_key(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = detail::splitmix64(seed ^ 0xA02B9D5CCE6A2F7Dull);
  for (std::uint64_t id : ids) {
    h = detail::splitmix64(h ^ (id + detail::kGolden));
  }
  return h;
}

// +1/-1 drawn from the key's low bit (after mixing).
inline int sign_from_key(std::uint64_t key) {
  return (detail::splitmix64(key) & 1ull) ? 1 : -1;
}

// Uniform bucket in [0, n) from a key. n must be > 0; bias is negligible for
// the bucket counts used here but we still use rejection to stay exact.
inline std::uint32_t bucket_from_key(std::uint64_t key, std::uint32_t n) {
  std::uint64_t x = detail::splitmix64(key ^ 0xD6E8FEB86659FD93ull);
  const std::uint64_t limit = ~0ull - (~0ull % n);
  while (x >= limit) {
    x = detail::splitmix64(x);
  }
  return static_cast<std::uint32_t>(x % n);
}

// Sequential stream generator (splitmix64). Deterministic and portable:
// no standard-library distributions are involved anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng from_key(std::uint64_t seed,
                      std::initializer_list<std::uint64_t> ids) {
    return Rng(derive_key(seed, ids));
  }

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = ~0ull - (~0ull % n);
    std::uint64_t x = next_u64();
    while (x >= limit) {
      x = next_u64();
    }
    return x % n;
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) {
      u1 = next_double();
    }
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace relatron
