#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssmp/batch.hpp"
#include "ssmp/rng.hpp"
#include "ssmp/stats.hpp"

using namespace ssmp;

TEST_CASE("kolmogorov tail at frozen reference points") {
  // Hand-computed partial sums of 2 sum (-1)^{k-1} e^{-2 k^2 l^2}.
  CHECK(kolmogorov_q(0.5) == doctest::Approx(0.963946).epsilon(1e-5));
  // Classical 5% critical value ~1.358.
  CHECK(kolmogorov_q(1.358) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(4.0) < 1e-10);
}

TEST_CASE("two-sample KS: exact small cases and CDF-distance recovery") {
  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), std::domain_error);

  const std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(ks_two_sample(a, a).statistic == doctest::Approx(0.0));
  CHECK(ks_two_sample(a, a).p_value == doctest::Approx(1.0));

  // F_a steps 0.5 at 1 and 1.0 at 2; G_b steps 1.0 at 1.5: sup distance 0.5.
  CHECK(ks_two_sample({1.0, 2.0}, {1.5}).statistic == doctest::Approx(0.5));

  RngStream rng(5, 0);
  const int n = 10000;
  std::vector<double> u1(n), u2(n);
  for (int i = 0; i < n; ++i) {
    u1[i] = rng.uniform();
    u2[i] = 0.5 + rng.uniform();
  }
  CHECK(ks_two_sample(u1, u2).statistic == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("two-sample KS null calibration") {
  int passed = 0;
  for (int rep = 0; rep < 100; ++rep) {
    RngStream ra(77, 2 * rep), rb(77, 2 * rep + 1);
    std::vector<double> a(2000), b(2000);
    for (auto& v : a) v = ra.normal();
    for (auto& v : b) v = rb.normal();
    if (ks_two_sample(a, b).p_value > 0.01) ++passed;
  }
  CHECK(passed >= 95);
}

TEST_CASE("one-sample KS: exact cases and a distributional run") {
  auto unif = [](double x) { return std::min(1.0, std::max(0.0, x)); };
  CHECK(ks_one_sample({0.5}, unif).statistic == doctest::Approx(0.5));
  CHECK(ks_one_sample({0.25, 0.75}, unif).statistic == doctest::Approx(0.25));

  RngStream rng(9, 1);
  std::vector<double> e(10000);
  for (auto& v : e) v = rng.exponential(2.0);
  const KsResult r =
      ks_one_sample(e, [](double x) { return exponential_cdf(2.0, x); });
  CHECK(r.statistic < 0.02);
  CHECK(r.p_value > 0.01);
}

TEST_CASE("regularized upper incomplete gamma against closed forms") {
  for (double x : {0.1, 1.0, 5.0, 20.0}) {
    CHECK(gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    CHECK(gamma_q(2.0, x) ==
          doctest::Approx(std::exp(-x) * (1.0 + x)).epsilon(1e-12));
    CHECK(gamma_q(0.5, x) ==
          doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-10));
  }
  CHECK(gamma_q(3.0, 0.0) == 1.0);
  CHECK(gamma_q(0.5, 1.0) > gamma_q(0.5, 2.0));
  CHECK_THROWS_AS(gamma_q(-1.0, 1.0), std::domain_error);
}

TEST_CASE("chi-square goodness of fit on hand-sized tables") {
  // (55-50)^2/50 + (45-50)^2/50 = 1, dof 1, p = erfc(sqrt(1/2)).
  const Chi2Result r = chi2_gof({55.0, 45.0}, {50.0, 50.0});
  CHECK(r.statistic == doctest::Approx(1.0));
  CHECK(r.dof == 1);
  CHECK(r.p_value ==
        doctest::Approx(std::erfc(std::sqrt(0.5))).epsilon(1e-10));
  CHECK(r.p_value == doctest::Approx(0.3173105).epsilon(1e-6));

  CHECK_THROWS_AS(chi2_gof({1.0}, {1.0}), std::domain_error);
  CHECK_THROWS_AS(chi2_gof({1.0, 2.0}, {1.0}), std::domain_error);
}

TEST_CASE("chi-square homogeneity on a 2x2 table") {
  // Rows {10,20} and {20,10}: all expected 15, stat = 100/15.
  const Chi2Result r = chi2_homogeneity({10.0, 20.0}, {20.0, 10.0});
  CHECK(r.statistic == doctest::Approx(100.0 / 15.0).epsilon(1e-12));
  CHECK(r.dof == 1);
  CHECK(r.p_value ==
        doctest::Approx(std::erfc(std::sqrt(100.0 / 30.0))).epsilon(1e-10));

  // Same law: counts drawn from one multinomial twice should pass.
  RngStream rng(31, 0);
  std::vector<double> ca(6, 0.0), cb(6, 0.0);
  for (int i = 0; i < 60000; ++i) {
    ca[rng.poisson(2.5) % 6] += 1.0;
    cb[rng.poisson(2.5) % 6] += 1.0;
  }
  CHECK(chi2_homogeneity(ca, cb).p_value > 0.01);
}

TEST_CASE("weighted least squares with known variances") {
  // Exact line is recovered exactly.
  const WlsFit exact = wls_fit({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0},
                               {0.5, 0.5, 0.5});
  CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(exact.intercept == doctest::Approx(1.0).epsilon(1e-14));
  // With all weights 4 and x = {0,1,2}: delta = 96, se_slope = sqrt(12/96).
  CHECK(exact.se_slope == doctest::Approx(std::sqrt(0.125)).epsilon(1e-14));
  CHECK(exact.se_intercept ==
        doctest::Approx(std::sqrt(20.0 / 96.0)).epsilon(1e-14));

  // Noisy regression: estimates land within 4 joint standard errors.
  RngStream rng(12, 4);
  std::vector<double> x, y, se;
  for (int i = 0; i < 200; ++i) {
    const double xi = 0.1 * i;
    const double s = 0.2 + 0.01 * i;
    x.push_back(xi);
    y.push_back(1.0 + 2.0 * xi + s * rng.normal());
    se.push_back(s);
  }
  const WlsFit fit = wls_fit(x, y, se);
  CHECK(std::abs(fit.slope - 2.0) < 4.0 * fit.se_slope);
  CHECK(std::abs(fit.intercept - 1.0) < 4.0 * fit.se_intercept);

  CHECK_THROWS_AS(wls_fit({1.0}, {1.0}, {1.0}), std::domain_error);
  CHECK_THROWS_AS(wls_fit({1.0, 1.0}, {1.0, 2.0}, {1.0, 1.0}),
                  std::domain_error);
}

TEST_CASE("distribution helpers") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-5));
  CHECK(chi1_cdf(1.0) == doctest::Approx(0.6826895).epsilon(1e-6));
  CHECK(chi1_cdf(0.0) == 0.0);
  CHECK(exponential_cdf(2.0, 0.5) == doctest::Approx(1.0 - std::exp(-1.0)));
}

TEST_CASE("parallel batches are deterministic across thread counts") {
  const long n = 64;
  std::vector<double> one(n), four(n);
  parallel_paths(n, 1, [&](long i) {
    RngStream rng(99, static_cast<uint64_t>(i));
    one[i] = rng.normal();
  });
  parallel_paths(n, 4, [&](long i) {
    RngStream rng(99, static_cast<uint64_t>(i));
    four[i] = rng.normal();
  });
  CHECK(one == four);
}
