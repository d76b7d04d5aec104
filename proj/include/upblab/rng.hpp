#pragma once

#include "upblab/linalg.hpp"

#include <array>
#include <cstdint>

namespace upblab {

// Philox4x32-10 counter-based generator. A stream is identified by a
// 64-bit key; split() derives an independent key for a sub-stream, so
// per-trial generators only depend on (seed, trial index).
class Philox {
 public:
  static constexpr const char* name = "philox4x32-10/v1";

  explicit Philox(std::uint64_t key = 0) : key_(key) {}

  Philox split(std::uint64_t stream) const {
    Philox mix(key_ ^ 0x9E3779B97F4A7C15ull);
    std::array<std::uint32_t, 4> b = mix.block(stream, 0xA5A5A5A5ull);
    return Philox((std::uint64_t(b[0]) << 32) | b[1]);
  }

  std::uint64_t next_u64() {
    if (buf_pos_ >= 2) {
      auto b = block(counter_++, 0);
      buf_[0] = (std::uint64_t(b[0]) << 32) | b[1];
      buf_[1] = (std::uint64_t(b[2]) << 32) | b[3];
      buf_pos_ = 0;
    }
    return buf_[buf_pos_++];
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  cd complex_normal() { return cd(normal(), normal()) / std::sqrt(2.0); }

  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  Vec complex_vector(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = complex_normal();
    return v;
  }

  Mat complex_matrix(int r, int c) {
    Mat M(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) M(i, j) = complex_normal();
    return M;
  }

  // One Philox4x32-10 block for the 128-bit counter (ctr_lo, ctr_hi).
  std::array<std::uint32_t, 4> block(std::uint64_t ctr_lo, std::uint64_t ctr_hi) const {
    std::array<std::uint32_t, 4> x{std::uint32_t(ctr_lo), std::uint32_t(ctr_lo >> 32), std::uint32_t(ctr_hi),
                                   std::uint32_t(ctr_hi >> 32)};
    std::uint32_t k0 = std::uint32_t(key_), k1 = std::uint32_t(key_ >> 32);
    for (int round = 0; round < 10; ++round) {
      std::uint64_t p0 = std::uint64_t(0xD2511F53u) * x[0];
      std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * x[2];
      std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
      std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
      x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return x;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int buf_pos_ = 2;
};

}  // namespace upblab
