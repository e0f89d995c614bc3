#pragma once

#include <cstdint>

namespace comoment {

// Counter-based uniform generator (Philox4x32-10). A draw is addressed by
// (seed, stream_id, index), so any draw of any stream is reachable in O(1)
// without generating predecessors. This is what makes chunked parallel
// simulation bit-reproducible independently of the thread count.
//
// Doubles are produced with 53 significant bits and lie strictly inside
// (0,1): an exact zero (probability 2^-53) is rejected and the draw is
// re-keyed deterministically until nonzero.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        s0_(static_cast<std::uint32_t>(stream_id)),
        s1_(static_cast<std::uint32_t>(stream_id >> 32)) {}

  // i-th uniform of this stream, strictly inside (0,1).
  double uniform(std::uint64_t i) const noexcept {
    for (std::uint32_t attempt = 0;; ++attempt) {
      std::uint32_t c0 = static_cast<std::uint32_t>(i);
      std::uint32_t c1 = static_cast<std::uint32_t>(i >> 32);
      std::uint32_t c2 = s0_ ^ (attempt * 0x9E3779B9u);
      std::uint32_t c3 = s1_ + attempt;
      block(c0, c1, c2, c3);
      std::uint64_t bits = (static_cast<std::uint64_t>(c0) << 32) | c1;
      double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  // Sequential convenience; positions advance one draw per call.
  double next() noexcept { return uniform(pos_++); }
  std::uint64_t position() const noexcept { return pos_; }
  void seek(std::uint64_t pos) noexcept { pos_ = pos; }

private:
  static void round(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
                    std::uint32_t& c3, std::uint32_t k0, std::uint32_t k1) noexcept {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c0;
    std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c2;
    std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    std::uint32_t n0 = hi1 ^ c1 ^ k0;
    std::uint32_t n1 = lo1;
    std::uint32_t n2 = hi0 ^ c3 ^ k1;
    std::uint32_t n3 = lo0;
    c0 = n0; c1 = n1; c2 = n2; c3 = n3;
  }

  void block(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
             std::uint32_t& c3) const noexcept {
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int r = 0; r < 10; ++r) {
      round(c0, c1, c2, c3, k0, k1);
      k0 += W0;
      k1 += W1;
    }
  }

  std::uint32_t key0_, key1_;
  std::uint32_t s0_, s1_;
  std::uint64_t pos_ = 0;
};

}  // namespace comoment
