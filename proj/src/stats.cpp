#include "ssmp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssmp {

double kolmogorov_q(double lambda) {
  if (lambda < 1e-10) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-18) break;
    sign = -sign;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::domain_error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0, fa = 0.0, fb = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    fa = i / na;
    fb = j / nb;
    d = std::max(d, std::abs(fa - fb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return {d, kolmogorov_q(lambda)};
}

KsResult ks_one_sample(std::vector<double> samples,
                       const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::domain_error("ks_one_sample: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  return {d, kolmogorov_q(lambda)};
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // Series for the lower function P; return 1 - P.
    double ap = a, del = 1.0 / a, sum = del;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // Lentz continued fraction for Q directly.
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

Chi2Result chi2_gof(const std::vector<double>& observed,
                    const std::vector<double>& expected,
                    int extra_constraints) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::domain_error("chi2_gof: size mismatch");
  double stat = 0.0;
  int used = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) {
      if (observed[i] > 0.0)
        throw std::domain_error("chi2_gof: observed mass where expected is 0");
      continue;
    }
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
    ++used;
  }
  const int dof = used - 1 - extra_constraints;
  if (dof <= 0) throw std::domain_error("chi2_gof: no degrees of freedom");
  return {stat, gamma_q(0.5 * dof, 0.5 * stat), dof};
}

Chi2Result chi2_homogeneity(const std::vector<double>& counts_a,
                            const std::vector<double>& counts_b) {
  if (counts_a.size() != counts_b.size() || counts_a.empty())
    throw std::domain_error("chi2_homogeneity: size mismatch");
  double ra = 0.0, rb = 0.0;
  for (double v : counts_a) ra += v;
  for (double v : counts_b) rb += v;
  if (!(ra > 0.0) || !(rb > 0.0))
    throw std::domain_error("chi2_homogeneity: empty row");
  const double total = ra + rb;
  double stat = 0.0;
  int used = 0;
  for (size_t i = 0; i < counts_a.size(); ++i) {
    const double col = counts_a[i] + counts_b[i];
    if (col <= 0.0) continue;
    const double ea = ra * col / total;
    const double eb = rb * col / total;
    stat += (counts_a[i] - ea) * (counts_a[i] - ea) / ea +
            (counts_b[i] - eb) * (counts_b[i] - eb) / eb;
    ++used;
  }
  const int dof = used - 1;
  if (dof <= 0) throw std::domain_error("chi2_homogeneity: single bin");
  return {stat, gamma_q(0.5 * dof, 0.5 * stat), dof};
}

WlsFit wls_fit(const std::vector<double>& x, const std::vector<double>& y,
               const std::vector<double>& se) {
  if (x.size() != y.size() || x.size() != se.size() || x.size() < 2)
    throw std::domain_error("wls_fit: need >= 2 points with errors");
  double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(se[i] > 0.0)) throw std::domain_error("wls_fit: se must be > 0");
    const double w = 1.0 / (se[i] * se[i]);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i];
  }
  const double delta = sw * swxx - swx * swx;
  if (!(delta > 0.0)) throw std::domain_error("wls_fit: degenerate abscissae");
  WlsFit fit;
  fit.slope = (sw * swxy - swx * swy) / delta;
  fit.intercept = (swxx * swy - swx * swxy) / delta;
  fit.se_slope = std::sqrt(sw / delta);
  fit.se_intercept = std::sqrt(swxx / delta);
  return fit;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi1_cdf(double x) { return x <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * x)); }

double exponential_cdf(double rate, double x) {
  return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
}

}  // namespace ssmp
