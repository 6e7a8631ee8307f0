#pragma once
// Counter-based random streams (Philox 4x32-10).  One stream per path index:
// streams with equal seed and distinct ids are statistically independent, and
// every draw depends only on (seed, stream id, draw counter), never on thread
// scheduling, so parallel batches are reproducible.

#include <cmath>
#include <cstdint>

namespace ssmp {

namespace detail {

inline void philox4x32_10(const uint32_t ctr[4], uint32_t k0, uint32_t k1,
                          uint32_t out[4]) {
  uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
  for (int round = 0; round < 10; ++round) {
    const uint64_t m0 = 0xD2511F53ull * c0;
    const uint64_t m1 = 0xCD9E8D57ull * c2;
    const uint32_t hi0 = static_cast<uint32_t>(m0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(m0);
    const uint32_t hi1 = static_cast<uint32_t>(m1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(m1);
    const uint32_t n0 = hi1 ^ c1 ^ k0;
    const uint32_t n1 = lo1;
    const uint32_t n2 = hi0 ^ c3 ^ k1;
    const uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }
  out[0] = c0;
  out[1] = c1;
  out[2] = c2;
  out[3] = c3;
}

}  // namespace detail

class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id)
      : key0_(static_cast<uint32_t>(seed)),
        key1_(static_cast<uint32_t>(seed >> 32)),
        stream_lo_(static_cast<uint32_t>(stream_id)),
        stream_hi_(static_cast<uint32_t>(stream_id >> 32)) {}

  uint64_t next_u64() {
    if (pos_ >= 4) refill();
    const uint64_t hi = block_[pos_];
    const uint64_t lo = block_[pos_ + 1];
    pos_ += 2;
    return (hi << 32) | lo;
  }

  // Uniform on [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe to pass to log().
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double th = 6.283185307179586 * uniform();
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // Exact Poisson sampler counting unit-rate arrivals; O(mean) draws.
  uint64_t poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    uint64_t n = 0;
    double acc = -std::log(uniform_pos());
    while (acc <= mean) {
      ++n;
      acc += -std::log(uniform_pos());
    }
    return n;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill() {
    const uint32_t ctr[4] = {static_cast<uint32_t>(counter_),
                             static_cast<uint32_t>(counter_ >> 32), stream_lo_,
                             stream_hi_};
    detail::philox4x32_10(ctr, key0_, key1_, block_);
    ++counter_;
    pos_ = 0;
  }

  uint32_t key0_, key1_;
  uint32_t stream_lo_, stream_hi_;
  uint64_t counter_ = 0;
  uint32_t block_[4] = {0, 0, 0, 0};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ssmp
