#pragma once

#include <cstdint>
#include <random>

#include "phonoparse/types.hpp"

namespace phonoparse::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and a stream id.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed;
  (void)splitmix64(s);
  s ^= 0x6a09e667f3bcc909ull + stream_id;
  (void)splitmix64(s);
  return splitmix64(s);
}

/// Deterministic random stream. mt19937_64 output is fully specified by the
/// standard and the draw helpers below avoid the implementation-defined
/// std::uniform_* distributions, so results are identical across platforms.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}
  Stream(std::uint64_t seed, std::uint64_t stream_id) : eng_(derive_seed(seed, stream_id)) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw Error("rng: below(0)");
    const unsigned __int128 full = static_cast<unsigned __int128>(1) << 64;
    const std::uint64_t rem = static_cast<std::uint64_t>(full % n);
    if (rem == 0) return next_u64() % n;
    const std::uint64_t bound = static_cast<std::uint64_t>(full - rem);
    std::uint64_t x = next_u64();
    while (x >= bound) x = next_u64();
    return x % n;
  }

  /// Uniform integer in [lo, hi] inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw Error("rng: between(lo > hi)");
    return lo + below(hi - lo + 1);
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace phonoparse::rng
