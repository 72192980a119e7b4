#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

// Deterministic RNG utilities. All randomness in the library flows through
// either a Stream (sequential draws) or stateless keyed draws (per-unit
// randomness tied to stable ids, so results survive row permutation).
namespace drate::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer; bijective, well-dispersed.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Order-sensitive key derivation for nested streams: key(a,b) != key(b,a).
constexpr std::uint64_t key(std::uint64_t a, std::uint64_t b) noexcept {
  return mix(a + kGamma + mix(b + kGamma));
}
constexpr std::uint64_t key(std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) noexcept {
  return key(key(a, b), c);
}
constexpr std::uint64_t key(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                            std::uint64_t d) noexcept {
  return key(key(a, b, c), d);
}

// splitmix64 sequence generator: fixed draw cost, trivially splittable.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t u64() noexcept {
    state_ += kGamma;
    return mix(state_);
  }

  // uniform in [0, 1)
  double u01() noexcept { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1]
  double u01_pos() noexcept {
    return static_cast<double>((u64() >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal, Box-Muller without caching (two u64 per draw)
  double normal() noexcept {
    const double u1 = u01_pos();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) noexcept { return u01() < p; }

  // uniform integer in [0, n); Lemire multiply-shift (fixed consumption)
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Stateless keyed draws (for per-unit randomness).
inline double u01_at(std::uint64_t k) noexcept {
  return static_cast<double>(mix(k + kGamma) >> 11) * 0x1.0p-53;
}

// draw at a given position of the stream seeded by `seed`, without state;
// equals Stream(seed) advanced step+1 times. One mix on the hot path.
inline double u01_stream_at(std::uint64_t seed, std::uint64_t step) noexcept {
  return static_cast<double>(mix(seed + (step + 1) * kGamma) >> 11) *
         0x1.0p-53;
}

inline double normal_at(std::uint64_t k) noexcept {
  const double u1 =
      static_cast<double>((mix(k + kGamma) >> 11) + 1) * 0x1.0p-53;
  const double u2 =
      static_cast<double>(mix(k + 2 * kGamma) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double rademacher_at(std::uint64_t k) noexcept {
  return (mix(k + kGamma) & 1ull) ? 1.0 : -1.0;
}

// Balanced deterministic V-fold assignment: rows ordered by hashed key take
// folds round-robin. Invariant to row permutation when keys are stable ids.
inline std::vector<int> fold_assignment(std::uint64_t seed,
                                        const std::vector<std::uint64_t>& keys,
                                        int v) {
  const std::size_t n = keys.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::uint64_t> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = mix(key(seed, keys[i]));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (h[a] != h[b]) return h[a] < h[b];
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return a < b;
  });
  std::vector<int> fold(n);
  for (std::size_t r = 0; r < n; ++r)
    fold[order[r]] = static_cast<int>(r % static_cast<std::size_t>(v));
  return fold;
}

}  // namespace drate::rng
