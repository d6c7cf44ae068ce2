#pragma once

#include <array>
#include <cstdint>

namespace qpart {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Identifies one independent variate stream.
struct RngHandle {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
};

/// Counter-based stream: key = seed, counter = (block index, stream index).
class RngStream {
 public:
  explicit RngStream(RngHandle h);
  RngStream(std::uint64_t seed, std::uint64_t stream) : RngStream(RngHandle{seed, stream}) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard exponential variate.
  double exponential();

  std::uint64_t draws() const { return draws_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int pos_ = 2;
  std::uint64_t draws_ = 0;
};

}  // namespace qpart
