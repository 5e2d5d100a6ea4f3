#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "borelsum/problem.hpp"
#include "borelsum/problem_io.hpp"
#include "borelsum/transforms.hpp"

using namespace borelsum;

namespace {

std::vector<double> test_m_grid() {
  std::vector<double> g;
  for (int j = -32; j <= 32; ++j) g.push_back(j * 0.5);
  return g;
}

ProblemSpec desk_spec() { return load_problem(DESK_PROBLEM_PATH); }

// Independent oracle for the Tahara coefficients: solve the linear system
// prod_{j<delta}(a - j) = prod_{j<delta}(a + jk) + sum_p A_p prod_{j<p}(a + jk)
// over delta-1 distinct exponents a.
std::vector<double> tahara_by_linear_solve(int delta, double k) {
  const int n = delta - 1;
  if (n <= 0) return {};
  auto falling = [&](double a) {
    double v = 1.0;
    for (int j = 0; j < delta; ++j) v *= (a - j);
    return v;
  };
  auto rising_k = [&](double a, int p) {
    double v = 1.0;
    for (int j = 0; j < p; ++j) v *= (a + j * k);
    return v;
  };
  std::vector<std::vector<double>> M(n, std::vector<double>(n + 1));
  for (int r = 0; r < n; ++r) {
    const double a = 1.3 + 0.7 * r;
    for (int p = 1; p <= n; ++p) M[r][p - 1] = rising_k(a, p);
    M[r][n] = falling(a) - rising_k(a, delta);
  }
  for (int c = 0; c < n; ++c) {  // gaussian elimination, partial pivot
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    std::swap(M[c], M[piv]);
    for (int r = c + 1; r < n; ++r) {
      const double f = M[r][c] / M[c][c];
      for (int c2 = c; c2 <= n; ++c2) M[r][c2] -= f * M[c][c2];
    }
  }
  std::vector<double> x(n);
  for (int c = n - 1; c >= 0; --c) {
    double s = M[c][n];
    for (int c2 = c + 1; c2 < n; ++c2) s -= M[c][c2] * x[c2];
    x[c] = s / M[c][c];
  }
  return x;
}

double tahara_identity_residual(int delta, double k, const std::vector<double>& A, double a) {
  double lhs = 1.0;
  for (int j = 0; j < delta; ++j) lhs *= (a - j);
  auto rising = [&](int p) {
    double v = 1.0;
    for (int j = 0; j < p; ++j) v *= (a + j * k);
    return v;
  };
  double rhs = rising(delta);
  for (int p = 1; p <= delta - 1; ++p) rhs += A[p - 1] * rising(p);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

}  // namespace

TEST_CASE("desk spec passes every hypothesis") {
  const ProblemSpec spec = desk_spec();
  const ValidationReport rep = validate_spec(spec, test_m_grid());
  INFO(rep.summary());
  CHECK(rep.passed());
  CHECK(rep.r1 == doctest::Approx(2.0));
  CHECK(rep.r2 == doctest::Approx(2.0));
  CHECK(rep.aperture == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-level inequalities d_l > delta_l (k+1)") {
  ProblemSpec spec = desk_spec();
  spec.D = 3;
  Level l2 = spec.levels[0];
  l2.index = 2;
  l2.delta = 2;
  l2.d = 5;
  l2.Delta = 4;
  spec.levels.push_back(l2);
  const ValidationReport rep = validate_spec(spec, test_m_grid());
  INFO(rep.summary());
  CHECK(rep.passed());  // 3 > 1.75 and 5 > 3.5
  CHECK(d_lk(spec, 1) == doctest::Approx(1.25));
  CHECK(d_lk(spec, 2) == doctest::Approx(1.5));
}

TEST_CASE("Q with a root on the imaginary axis fails") {
  ProblemSpec spec = desk_spec();
  spec.Q = ComplexPolynomial({{1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});  // X^2 + 1, Q(i*1) = 0
  const ValidationReport rep = validate_spec(spec, test_m_grid());
  bool q_failed = false;
  for (const auto& e : rep.entries)
    if (e.name == "Q(im) != 0" && !e.passed) q_failed = true;
  CHECK(q_failed);
}

TEST_CASE("k outside (1/2,1) is a hard error") {
  ProblemSpec spec = desk_spec();
  spec.k = 1.2;
  CHECK_THROWS_WITH_AS(validate_spec(spec, test_m_grid()),
                       doctest::Contains("k in (1/2,1)"), validation_error);
}

TEST_CASE("d_lk rejects non-positive values") {
  ProblemSpec spec = desk_spec();
  spec.levels[0].d = 1;  // 1 - 1.75 <= 0
  CHECK_THROWS_AS(d_lk(spec, 1), validation_error);
}

TEST_CASE("tahara coefficients: delta = 1 and 2") {
  const double k = 0.75;
  CHECK(tahara_coefficients(1, k).empty());
  const auto a2 = tahara_coefficients(2, k);
  REQUIRE(a2.size() == 1);
  CHECK(a2[0] == doctest::Approx(-(k + 1.0)).epsilon(1e-15));
}

TEST_CASE("tahara coefficients match the linear-solve oracle and the operator identity") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> expo(1.0, 10.0);
  for (double k : {0.75, 0.6, 0.9}) {
    for (int delta = 2; delta <= 6; ++delta) {
      const auto rec = tahara_coefficients(delta, k);
      const auto ora = tahara_by_linear_solve(delta, k);
      REQUIRE(rec.size() == ora.size());
      for (std::size_t i = 0; i < rec.size(); ++i)
        CHECK(std::abs(rec[i] - ora[i]) <= 1e-9 * std::max(1.0, std::abs(ora[i])));
      for (int trial = 0; trial < 8; ++trial)
        CHECK(tahara_identity_residual(delta, k, rec, expo(rng)) <= 1e-10);
    }
  }
}

TEST_CASE("forcing psi: single mode is exactly F_1 tau / Gamma(1/k)") {
  const ProblemSpec spec = desk_spec();
  GridShape shape;
  shape.panels = 10;
  shape.n_m = 33;
  shape.m_max = 16.0;
  shape.r_max = 2.0;
  BorelGrid tpl = make_borel_grid(shape, 0.3, cplx(0.05, 0.02));
  const ForcingPsiResult res = forcing_psi(spec, tpl);
  CHECK(res.terms_used >= 1);
  const double inv_gamma = std::exp(-std::lgamma(1.0 / spec.k));
  for (std::size_t i = 0; i < tpl.n_r(); i += 17) {
    for (std::size_t j = 0; j < tpl.n_m(); j += 7) {
      const cplx tau = std::polar(tpl.radial.nodes[i], tpl.gamma);
      const cplx expect = spec.forcing.eval(1, tpl.m_nodes[j], tpl.eps) * tau * inv_gamma;
      CHECK(std::abs(res.grid.at(i, j) - expect) <= 1e-14 * (1.0 + std::abs(expect)));
    }
  }
}

TEST_CASE("forcing psi: zero forcing gives the zero grid, and psi is linear") {
  ProblemSpec spec = desk_spec();
  GridShape shape;
  shape.panels = 8;
  shape.n_m = 17;
  shape.r_max = 2.0;
  BorelGrid tpl = make_borel_grid(shape, 0.0, cplx(0.05, 0.0));

  ProblemSpec zero = spec;
  zero.forcing.modes.clear();
  CHECK(forcing_psi(zero, tpl).grid.max_abs() == 0.0);

  ProblemSpec twice = spec;
  twice.forcing.modes[0].amplitude *= 2.0;
  twice.forcing.K0 *= 2.0;
  const BorelGrid one = forcing_psi(spec, tpl).grid;
  const BorelGrid two = forcing_psi(twice, tpl).grid;
  for (std::size_t t = 0; t < one.values.size(); t += 11)
    CHECK(std::abs(two.values[t] - 2.0 * one.values[t]) <= 1e-14 * (1.0 + std::abs(one.values[t])));
}

TEST_CASE("forcing psi: geometric mode family truncates with a covering tail bound") {
  ProblemSpec spec = desk_spec();
  spec.forcing.modes.clear();
  spec.forcing.K0 = 2.0;
  spec.forcing.T0 = 2.0;
  for (int n = 1; n <= 24; ++n) {
    ForcingMode mode = {n, std::pow(1.0 / spec.forcing.T0, n), 2.5, 1.0,
                        ModalKind::cosine, 0.0, ComplexPolynomial({cplx(1.0, 0.0)})};
    spec.forcing.modes.push_back(mode);
  }
  GridShape shape;
  shape.panels = 10;
  shape.n_m = 17;
  shape.r_max = 3.0;
  BorelGrid tpl = make_borel_grid(shape, 0.1, cplx(0.03, 0.0));

  const ForcingPsiResult full = forcing_psi(spec, tpl, 1e-12, 400);
  const ForcingPsiResult trunc = forcing_psi(spec, tpl, 1e-12, 12);
  CHECK(trunc.terms_used == 12);
  double max_diff = 0.0;
  for (std::size_t t = 0; t < full.grid.values.size(); ++t)
    max_diff = std::max(max_diff, std::abs(full.grid.values[t] - trunc.grid.values[t]));
  CHECK(max_diff <= 2.0 * trunc.tail_estimate + 1e-18);
  CHECK(norm_f(full.grid) > 0.0);
  CHECK(std::isfinite(norm_f(full.grid)));
}
