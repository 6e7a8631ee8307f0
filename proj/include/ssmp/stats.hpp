#pragma once
// Statistical primitives used by the validation suite: Kolmogorov-Smirnov
// tests with asymptotic p-values, chi-square tests via the regularized
// incomplete gamma function, and weighted least squares with known variances.

#include <functional>
#include <vector>

namespace ssmp {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test; asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample test of samples against a continuous CDF.
KsResult ks_one_sample(std::vector<double> samples,
                       const std::function<double(double)>& cdf);

// Tail of the Kolmogorov distribution: Q(l) = 2 sum (-1)^{k-1} e^{-2k^2 l^2}.
double kolmogorov_q(double lambda);

// Regularized upper incomplete gamma Q(a, x); Q(a, 0) = 1.
double gamma_q(double a, double x);

struct Chi2Result {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
};

// Goodness of fit of observed counts against expected counts.
// dof = bins - 1 - extra_constraints (fitted-parameter correction).
Chi2Result chi2_gof(const std::vector<double>& observed,
                    const std::vector<double>& expected,
                    int extra_constraints = 0);

// Homogeneity of two count vectors over the same bins (2 x K table).
Chi2Result chi2_homogeneity(const std::vector<double>& counts_a,
                            const std::vector<double>& counts_b);

struct WlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double se_slope = 0.0;
  double se_intercept = 0.0;
};

// Weighted least squares y ~ intercept + slope x with known per-point
// standard errors.
WlsFit wls_fit(const std::vector<double>& x, const std::vector<double>& y,
               const std::vector<double>& se);

double normal_cdf(double x);

// P(chi^2_1 <= x) = erf(sqrt(x/2)).
double chi1_cdf(double x);

double exponential_cdf(double rate, double x);

}  // namespace ssmp
