#pragma once
// Counter-based random streams.
//
// A RandomStream is a view of the Philox4x32-10 block cipher keyed by a 64-bit seed.
// The 128-bit cipher counter holds (draw index / 2, stream id), so every draw is a
// pure function of (seed, stream_id, counter). Streams are single-owner; parallel
// work gets disjoint stream ids via child().

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace gmix {

namespace philox {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Block encrypt(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

}  // namespace philox

/// SplitMix64 finalizer; used to derive child stream ids.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0, std::uint64_t counter = 0)
      : seed_(seed), stream_id_(stream_id), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  /// The 64-bit output at an arbitrary position; does not touch the stream state.
  std::uint64_t at(std::uint64_t counter) const { return block(counter >> 1)[counter & 1u]; }

  result_type operator()() {
    const std::uint64_t index = counter_ >> 1;
    if (index != cached_index_) {
      cached_ = block(index);
      cached_index_ = index;
    }
    return cached_[counter_++ & 1u];
  }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential() { return -std::log(uniform()); }

  double normal() { return normal_(*this); }

  /// Gamma(shape, 1).
  double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(*this); }

  /// +1 or -1 with equal probability.
  double sign() { return ((*this)() >> 63) != 0 ? 1.0 : -1.0; }

  std::uint64_t below(std::uint64_t bound) { return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(*this); }

  /// An independent stream sharing the seed, with a derived stream id.
  RandomStream child(std::uint64_t index) const {
    return RandomStream(seed_, mix64(stream_id_ ^ mix64(index + 0x632BE59BD9B4E019ull)));
  }

 private:
  std::array<std::uint64_t, 2> block(std::uint64_t index) const {
    const philox::Block ctr = {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                               static_cast<std::uint32_t>(stream_id_),
                               static_cast<std::uint32_t>(stream_id_ >> 32)};
    const philox::Key key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    const philox::Block out = philox::encrypt(ctr, key);
    return {(std::uint64_t{out[1]} << 32) | out[0], (std::uint64_t{out[3]} << 32) | out[2]};
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_;
  std::array<std::uint64_t, 2> cached_{};
  std::uint64_t cached_index_ = ~std::uint64_t{0};
  std::normal_distribution<double> normal_;
};

}  // namespace gmix
