#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rrr {

/// Counter-based, splittable random stream. The k-th draw is a pure function
/// of (seed, stream_id, k), so streams can be forked up front and consumed by
/// parallel workers with results independent of scheduling. Identical
/// (seed, stream_id) pairs give identical integer/uniform sequences across
/// runs and platforms; normal draws are additionally bitwise-stable within a
/// build (they go through libm).
///
/// A stream is value-semantic and cheap to copy, but a single stream must not
/// be drawn from by two workers at once; fork() instead.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_(stream_id), base_(mix(mix(seed + kGolden) ^ mix(stream_id + kSalt))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  /// Child stream derived from (seed, stream_id, child_id). Deterministic and
  /// collision-resistant under the mixer.
  RngStream fork(std::uint64_t child_id) const {
    RngStream child(*this);
    child.stream_ = mix(stream_ + kSalt + mix(child_id + kGolden));
    child.base_ = mix(mix(seed_ + kGolden) ^ mix(child.stream_ + kSalt));
    child.counter_ = 0;
    child.has_cached_ = false;
    return child;
  }

  std::uint64_t next_u64() { return mix(base_ + (++counter_) * kGolden); }

  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Unbiased integer on [0, bound) via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  /// Standard normal via Box-Muller; the pair's second value is cached so one
  /// normal consumes one uniform on average.
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSalt = 0xB5297A4D3C8D2E6BULL;

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace rrr
