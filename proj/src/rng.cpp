#include "qpart/rng.hpp"

#include <cmath>

namespace qpart {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t(a) * b;
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

RngStream::RngStream(RngHandle h)
    : key_{std::uint32_t(h.seed), std::uint32_t(h.seed >> 32)}, stream_(h.stream_index) {}

void RngStream::refill() {
  const auto out = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32),
                               std::uint32_t(stream_), std::uint32_t(stream_ >> 32)},
                              key_);
  ++block_;
  buf_[0] = (std::uint64_t(out[1]) << 32) | out[0];
  buf_[1] = (std::uint64_t(out[3]) << 32) | out[2];
  pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (pos_ == 2) refill();
  ++draws_;
  return buf_[pos_++];
}

double RngStream::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::exponential() { return -std::log1p(-uniform()); }

}  // namespace qpart
