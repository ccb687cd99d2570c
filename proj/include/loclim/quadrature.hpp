#pragma once

#include <functional>
#include <vector>

namespace loclim {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule, computed once per n and cached.
const GaussRule& gauss_legendre(int n);

// Rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  double l1 = 0.0;     // int |f|
};

// Double-exponential quadrature on [a, b] (a, b may be infinite). Endpoint
// singularities are allowed. One rule instance per thread.
QuadResult tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace loclim
