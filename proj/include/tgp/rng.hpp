#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace tgp {

/// SplitMix64. One step:
///
///   state += 0x9e3779b97f4a7c15
///   z = state
///   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, bound) by rejection: draws below
  /// (2^64 - bound) mod bound are discarded, then reduced modulo bound.
  std::uint64_t bounded(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

/// Combines a base seed with a salt into a new seed (one SplitMix64 step of
/// seed ^ salt).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return SplitMix64(seed ^ salt).next();
}

/// Forward partial Fisher-Yates over indices [0, n): for i in [0, k),
/// j = i + bounded(n - i), swap(idx[i], idx[j]). Returns the full permuted
/// index array; the first k entries are the uniform sample without
/// replacement, in draw order.
inline std::vector<std::size_t> partial_shuffle(std::size_t n, std::size_t k,
                                                SplitMix64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k && i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

/// Full Fisher-Yates permutation of [0, n) using the same forward scheme.
inline std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return partial_shuffle(n, n, rng);
}

}  // namespace tgp
