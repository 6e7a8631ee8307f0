#include "ssmp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ssmp {

namespace {

GaussLegendre build_rule(int n) {
  GaussLegendre rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Initial guess for the i-th root of P_n, then Newton.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mtx;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int order) {
  if (!(b > a)) return 0.0;
  const GaussLegendre& rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double halfw = 0.5 * (b - a);
  double acc = 0.0;
  for (size_t i = 0; i < rule.x.size(); ++i)
    acc += rule.w[i] * f(mid + halfw * rule.x[i]);
  return acc * halfw;
}

}  // namespace ssmp
