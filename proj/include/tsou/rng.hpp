#pragma once

#include <array>
#include <cstdint>

namespace tsou {

// Philox4x32-10 block: 4 counter words, 2 key words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// Counter-based stream. The key is the seed, the upper counter half is the
// stream id, so (seed, stream_id) pairs never overlap and need no jumping.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64() {
    if (pos_ == 2) refill();
    ++draws_;
    return buf_[pos_++];
  }
  // Uniform on the open interval (0, 1), 53 bits.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  double exponential();
  double normal();
  double gamma(double shape);  // unit scale
  std::uint64_t poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  // Number of 64-bit words consumed so far.
  std::uint64_t draws() const { return draws_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int pos_ = 2;
  std::uint64_t draws_ = 0;
};

}  // namespace tsou
