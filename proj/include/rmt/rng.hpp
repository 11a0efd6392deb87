#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace rmt {

// Counter-based 4x32 block generator keyed by (seed; stream, index).
// Any (stream, index) block can be computed independently, so sample
// streams are reproducible regardless of evaluation order or thread count.
class Philox {
 public:
  Philox(uint64_t seed, uint64_t stream) : key_(seed), stream_(stream) {}

  std::array<uint32_t, 4> block(uint64_t index) const {
    uint32_t c0 = uint32_t(index), c1 = uint32_t(index >> 32);
    uint32_t c2 = uint32_t(stream_), c3 = uint32_t(stream_ >> 32);
    uint32_t k0 = uint32_t(key_), k1 = uint32_t(key_ >> 32);
    for (int r = 0; r < 10; ++r) {
      uint64_t p0 = uint64_t(0xD2511F53u) * c0;
      uint64_t p1 = uint64_t(0xCD9E8D57u) * c2;
      c0 = uint32_t(p1 >> 32) ^ c1 ^ k0;
      c1 = uint32_t(p1);
      c2 = uint32_t(p0 >> 32) ^ c3 ^ k1;
      c3 = uint32_t(p0);
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return {c0, c1, c2, c3};
  }

 private:
  uint64_t key_, stream_;
};

// Sequential view of one stream: uniforms in (0,1) at 53-bit resolution,
// standard normals via Box-Muller (two per block).
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream) : gen_(seed, stream) {}

  double uniform01() {
    if (have_u_) {
      have_u_ = false;
      return u_cache_;
    }
    auto b = gen_.block(idx_++);
    u_cache_ = to_unit(b[2], b[3]);
    have_u_ = true;
    return to_unit(b[0], b[1]);
  }

  double normal() {
    if (have_n_) {
      have_n_ = false;
      return n_cache_;
    }
    auto z = normal_pair();
    n_cache_ = z.imag();
    have_n_ = true;
    return z.real();
  }

  // Both Box-Muller components from a single block.
  std::complex<double> normal_pair() {
    auto b = gen_.block(idx_++);
    double u1 = to_unit(b[0], b[1]);
    double u2 = to_unit(b[2], b[3]);
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  static double to_unit(uint32_t hi, uint32_t lo) {
    uint64_t v = (uint64_t(hi) << 32) | lo;
    return double((v >> 11) + 0.5) * 0x1p-53;  // strictly inside (0,1)
  }

  Philox gen_;
  uint64_t idx_ = 0;
  double u_cache_ = 0.0, n_cache_ = 0.0;
  bool have_u_ = false, have_n_ = false;
};

}  // namespace rmt
