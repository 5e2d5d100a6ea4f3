#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "borelsum/gauss.hpp"
#include "borelsum/types.hpp"

using namespace borelsum;

namespace {

// Beta-function oracle: int_0^c (c-h)^a h^b dh = c^{a+b+1} B(a+1, b+1)
double beta_integral(double a, double b, double c) {
  return std::pow(c, a + b + 1.0) *
         std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const QuadRule q = gauss_legendre(8, 0.0, 2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * std::pow(q.x[i], 15.0);
  CHECK(acc == doctest::Approx(std::pow(2.0, 16.0) / 16.0).epsilon(1e-13));
}

TEST_CASE("gauss-jacobi left rule carries the h^beta weight exactly") {
  for (double beta : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.5}) {
    for (double c : {1.0, 0.37, 1e-4}) {
      const QuadRule q = gauss_jacobi_left(beta, 12, c);
      for (int a = 0; a <= 5; ++a) {
        double acc = 0.0;
        for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * std::pow(q.x[i], a);
        const double exact = std::pow(c, beta + a + 1.0) / (beta + a + 1.0);
        CHECK(std::abs(acc - exact) <= 1e-13 * std::abs(exact));
      }
    }
  }
}

TEST_CASE("gauss-jacobi right rule against the Beta oracle") {
  for (double alpha : {-2.0 / 3.0, 0.5, 2.0}) {
    const double c = 0.8;
    const QuadRule q = gauss_jacobi_right(alpha, 14, c);
    for (int b = 0; b <= 4; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * std::pow(q.x[i], b);
      const double exact = beta_integral(alpha, static_cast<double>(b), c);
      CHECK(std::abs(acc - exact) <= 1e-12 * std::abs(exact));
    }
  }
}

TEST_CASE("jacobi weights are positive and nodes interior") {
  const QuadRule& q = gauss_jacobi(-0.5, 1.25, 16);
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    CHECK(q.w[i] > 0.0);
    CHECK(q.x[i] > -1.0);
    CHECK(q.x[i] < 1.0);
    if (i > 0) CHECK(q.x[i] > q.x[i - 1]);
  }
}

TEST_CASE("invalid exponents are rejected") {
  CHECK_THROWS_AS(gauss_jacobi(-1.0, 0.0, 4), validation_error);
}
