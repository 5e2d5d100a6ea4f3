#pragma once

#include <cstddef>
#include <vector>

namespace borelsum {

/// Nodes and weights of an n-point quadrature rule on a reference interval.
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Jacobi rule for int_{-1}^{1} (1-x)^alpha (1+x)^beta f(x) dx.
/// alpha, beta > -1. Gauss-Legendre is the special case alpha = beta = 0.
/// Nodes via Sturm bisection on the Jacobi matrix, weights via the
/// Christoffel function. Results are cached per (alpha, beta, n).
const QuadRule& gauss_jacobi(double alpha, double beta, int n);

/// Gauss-Legendre rule mapped to [a, b].
QuadRule gauss_legendre(int n, double a, double b);

/// Rule for int_0^c h^{beta} f(h) dh with the weight carried exactly:
/// sum w_i f(x_i) equals the weighted integral for polynomial f.
QuadRule gauss_jacobi_left(double beta, int n, double c);

/// Rule for int_0^c (c-h)^{alpha} f(h) dh (weight singular at the right end).
QuadRule gauss_jacobi_right(double alpha, int n, double c);

}  // namespace borelsum
