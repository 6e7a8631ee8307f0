#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "ssmp/rng.hpp"

namespace {

// Independent reference implementation, structured differently from the
// library one: explicit mulhilo helper, key schedule applied before each of
// rounds 1..9.
void mulhilo(uint32_t a, uint32_t b, uint32_t* hi, uint32_t* lo) {
  const uint64_t p = static_cast<uint64_t>(a) * b;
  *hi = static_cast<uint32_t>(p >> 32);
  *lo = static_cast<uint32_t>(p);
}

void philox_reference(const uint32_t in[4], uint32_t key0, uint32_t key1,
                      uint32_t out[4]) {
  uint32_t x[4] = {in[0], in[1], in[2], in[3]};
  uint32_t k[2] = {key0, key1};
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(0xD2511F53u, x[0], &hi0, &lo0);
    mulhilo(0xCD9E8D57u, x[2], &hi1, &lo1);
    const uint32_t y0 = hi1 ^ x[1] ^ k[0];
    const uint32_t y2 = hi0 ^ x[3] ^ k[1];
    x[0] = y0;
    x[1] = lo1;
    x[2] = y2;
    x[3] = lo0;
  }
  for (int i = 0; i < 4; ++i) out[i] = x[i];
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  uint32_t out[4];

  const uint32_t zeros[4] = {0, 0, 0, 0};
  ssmp::detail::philox4x32_10(zeros, 0u, 0u, out);
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  const uint32_t ones[4] = {0xffffffffu, 0xffffffffu, 0xffffffffu,
                            0xffffffffu};
  ssmp::detail::philox4x32_10(ones, 0xffffffffu, 0xffffffffu, out);
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  const uint32_t pi_ctr[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                              0x03707344u};
  ssmp::detail::philox4x32_10(pi_ctr, 0xa4093822u, 0x299f31d0u, out);
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("philox matches an independent reference on many inputs") {
  uint32_t ctr[4] = {1, 2, 3, 4};
  uint32_t k0 = 0xdeadbeefu, k1 = 0xcafef00du;
  for (int i = 0; i < 1000; ++i) {
    uint32_t a[4], b[4];
    ssmp::detail::philox4x32_10(ctr, k0, k1, a);
    philox_reference(ctr, k0, k1, b);
    for (int j = 0; j < 4; ++j) CHECK(a[j] == b[j]);
    // Scramble the inputs for the next round using the output itself.
    for (int j = 0; j < 4; ++j) ctr[j] = a[j] + 0x9e3779b9u * (j + 1);
    k0 ^= a[1];
    k1 += a[3];
  }
}

TEST_CASE("streams are deterministic and distinct") {
  ssmp::RngStream r1(42, 7), r2(42, 7), r3(42, 8), r4(43, 7);
  bool same_stream_equal = true, other_stream_equal = true,
       other_seed_equal = true;
  for (int i = 0; i < 256; ++i) {
    const uint64_t v = r1.next_u64();
    same_stream_equal &= (v == r2.next_u64());
    other_stream_equal &= (v == r3.next_u64());
    other_seed_equal &= (v == r4.next_u64());
  }
  CHECK(same_stream_equal);
  CHECK_FALSE(other_stream_equal);
  CHECK_FALSE(other_seed_equal);
}

TEST_CASE("uniform lies in [0,1) and uniform_pos in (0,1]") {
  ssmp::RngStream rng(1, 0);
  double mn = 1.0, mx = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    mn = std::min(mn, u);
    mx = std::max(mx, u);
    sum += u;
    const double p = rng.uniform_pos();
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
  }
  CHECK(mn >= 0.0);
  CHECK(mx < 1.0);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal, exponential, poisson, bernoulli moments") {
  ssmp::RngStream rng(2024, 1);
  const int n = 400000;

  double s = 0.0, s2 = 0.0, s3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
    s3 += x * x * x;
  }
  CHECK(s / n == doctest::Approx(0.0).epsilon(1.0).scale(0.01));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s3 / n == doctest::Approx(0.0).epsilon(1.0).scale(0.05));

  double se = 0.0;
  for (int i = 0; i < n; ++i) se += rng.exponential(2.0);
  CHECK(se / n == doctest::Approx(0.5).epsilon(0.02));

  double sp = 0.0, sp2 = 0.0;
  const int np = 100000;
  for (int i = 0; i < np; ++i) {
    const double k = static_cast<double>(rng.poisson(3.0));
    sp += k;
    sp2 += k * k;
  }
  const double pm = sp / np;
  CHECK(pm == doctest::Approx(3.0).epsilon(0.02));
  CHECK(sp2 / np - pm * pm == doctest::Approx(3.0).epsilon(0.05));
  CHECK(rng.poisson(0.0) == 0);
  CHECK(rng.poisson(-1.0) == 0);

  int heads = 0;
  for (int i = 0; i < n; ++i) heads += rng.bernoulli(0.3) ? 1 : 0;
  CHECK(static_cast<double>(heads) / n == doctest::Approx(0.3).epsilon(0.02));
}
