#pragma once

#include <array>
#include <cstdint>

namespace padic {

/// Counter-based random stream (Philox4x32-10) keyed by hash(seed, stream_id).
///
/// Each stream is single-owner. Streams with distinct ids share no state, so
/// Monte-Carlo work split across ids is reproducible for a fixed partition.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., n-1}; n >= 1. Unbiased (Lemire's method).
  std::uint32_t below(std::uint32_t n);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

namespace detail {
/// One Philox4x32 block with 10 rounds.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);
}  // namespace detail

/// SplitMix64 finaliser; used to derive stream keys and per-cell seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for sub-experiment `index` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace padic
