#pragma once
// Gauss-Legendre quadrature used for the scalar functionals of jump measures.
// Nodes are computed once per order by Newton iteration on the Legendre
// polynomials and cached.

#include <functional>
#include <vector>

namespace ssmp {

struct GaussLegendre {
  std::vector<double> x;  // nodes on (-1,1)
  std::vector<double> w;  // weights
};

// Cached rule of the given order (64 and 256 are the orders used here).
const GaussLegendre& gauss_legendre(int n);

// Integral of f over [a,b] with a single rule application.
double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int order = 256);

}  // namespace ssmp
