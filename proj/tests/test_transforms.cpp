#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "borelsum/grid.hpp"
#include "borelsum/transforms.hpp"

using namespace borelsum;

namespace {

GridShape small_shape() {
  GridShape s;
  s.r_max = 6.0;
  s.panels = 25;
  s.nodes_per_panel = 8;
  s.m_max = 20.0;
  s.n_m = 33;
  s.nu = 1.5;
  s.k = 0.75;
  return s;
}

// fills the whole grid with w(u) = u^n / Gamma(n/k)
void fill_monomial(BorelGrid& g, int n) {
  const double inv_gamma = std::exp(-std::lgamma(n / g.k));
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    const cplx u = std::polar(g.radial.nodes[i], g.gamma);
    cplx p(1.0, 0.0);
    for (int q = 0; q < n; ++q) p *= u;
    for (std::size_t j = 0; j < g.n_m(); ++j) g.at(i, j) = p * inv_gamma;
  }
}

}  // namespace

TEST_CASE("laplace of u^n/Gamma(n/k) is T^n") {
  const GridShape shape = small_shape();
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> mod(0.015, 0.032);
  std::uniform_real_distribution<double> arg(-0.25, 0.25);
  for (int n = 1; n <= 5; ++n) {
    BorelGrid g = make_borel_grid(shape, 0.3, cplx(0.0, 0.0));
    fill_monomial(g, n);
    for (int trial = 0; trial < 10; ++trial) {
      const cplx T = std::polar(mod(rng), g.gamma + arg(rng));
      const LaplaceResult res = laplace_k(g, 0, T);
      cplx expect(1.0, 0.0);
      for (int q = 0; q < n; ++q) expect *= T;
      CHECK(std::abs(res.value - expect) <= 1e-6 * std::abs(expect));
    }
  }
}

TEST_CASE("laplace of zero is zero and the operator is linear") {
  const GridShape shape = small_shape();
  BorelGrid z = make_borel_grid(shape, 0.1, cplx(0.0, 0.0));
  const cplx T = std::polar(0.02, 0.1);
  CHECK(std::abs(laplace_k(z, 3, T).value) == 0.0);

  BorelGrid w1 = make_borel_grid(shape, 0.1, cplx(0.0, 0.0));
  BorelGrid w2 = make_borel_grid(shape, 0.1, cplx(0.0, 0.0));
  fill_monomial(w1, 1);
  fill_monomial(w2, 2);
  const cplx a(0.7, -0.3), b(-1.1, 0.4);
  BorelGrid sum = zero_like(w1);
  add_scaled(sum, a, w1);
  add_scaled(sum, b, w2);
  const cplx lhs = laplace_k(sum, 0, T).value;
  const cplx rhs = a * laplace_k(w1, 0, T).value + b * laplace_k(w2, 0, T).value;
  CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + std::abs(rhs) + 1e-30));
}

TEST_CASE("laplace rejects inadmissible directions") {
  const GridShape shape = small_shape();
  BorelGrid g = make_borel_grid(shape, 0.0, cplx(0.0, 0.0));
  fill_monomial(g, 1);
  // k(gamma - arg T) = 0.75 * 2.3 gives cos < 0.05
  CHECK_THROWS_AS(laplace_k(g, 0, std::polar(0.02, 2.3)), numeric_error);
}

TEST_CASE("borel transform divides by Gamma(1 + j/k), inverse pairs") {
  const double k = 0.75;
  std::vector<cplx> ones{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  const auto b1 = borel_k(ones, k);
  CHECK(b1[0] == cplx(1.0, 0.0));
  CHECK(b1[1] == cplx(0.0, 0.0));

  std::vector<cplx> gammas(6);
  for (int j = 0; j < 6; ++j) gammas[j] = std::tgamma(1.0 + j / k);
  for (const auto& v : borel_k(gammas, k))
    CHECK(std::abs(v - cplx(1.0, 0.0)) <= 1e-12);
}

TEST_CASE("summability roundtrip: laplace_series(borel(eps^n)) = eps^n") {
  const double k = 0.75;
  const RadialRule rule = make_radial_rule(6.0, 30, 8);
  const double gamma = 0.2;
  for (int n = 1; n <= 4; ++n) {
    // Borel image of the series eps^n is u^n / Gamma(1 + n/k)
    std::vector<cplx> v(rule.size());
    const double inv_gamma = std::exp(-std::lgamma(1.0 + n / k));
    for (std::size_t i = 0; i < rule.size(); ++i) {
      cplx p(1.0, 0.0);
      const cplx u = std::polar(rule.nodes[i], gamma);
      for (int q = 0; q < n; ++q) p *= u;
      v[i] = p * inv_gamma;
    }
    for (double mod : {0.02, 0.03}) {
      const cplx eps = std::polar(mod, gamma + 0.1);
      const cplx got = laplace_series_k(rule, gamma, k, v, eps);
      cplx expect(1.0, 0.0);
      for (int q = 0; q < n; ++q) expect *= eps;
      CHECK(std::abs(got - expect) <= 1e-6 * std::abs(expect));
    }
  }
}

TEST_CASE("fourier inverse of e^{-|m|} at z = 0 matches the closed form") {
  MLine f;
  const int n = 8193;
  const double M = 30.0;
  for (int j = 0; j < n; ++j) {
    const double m = -M + 2.0 * M * j / (n - 1);
    f.m.push_back(m);
    f.v.push_back(std::exp(-std::abs(m)));
  }
  const FourierResult res = fourier_inverse(f, cplx(0.0, 0.0), 1.0);
  const double expect = 2.0 / std::sqrt(2.0 * pi);
  CHECK(std::abs(res.value - expect) <= 1e-4 * expect);
}

TEST_CASE("fourier derivative identity (Def 3a) on the desk m-grid") {
  GridShape shape = small_shape();
  shape.m_max = 56.0;
  shape.n_m = 129;
  BorelGrid g = make_borel_grid(shape, 0.0, cplx(0.0, 0.0));
  MLine f = mline_from_grid(g);
  for (std::size_t j = 0; j < f.m.size(); ++j)
    f.v[j] = std::exp(-std::abs(f.m[j])) / std::pow(1.0 + std::abs(f.m[j]), 2.5);
  MLine im_f = f;
  for (std::size_t j = 0; j < f.m.size(); ++j) im_f.v[j] *= cplx(0.0, f.m[j]);

  const double h = 5e-4;
  for (const cplx z : {cplx(0.3, 0.0), cplx(-1.2, 0.2), cplx(0.0, 0.4)}) {
    const cplx dz = (fourier_inverse(f, z + h, 1.0).value -
                     fourier_inverse(f, z - h, 1.0).value) /
                    (2.0 * h);
    const cplx direct = fourier_inverse(im_f, z, 1.0).value;
    CHECK(std::abs(dz - direct) <= 1e-5 * (std::abs(direct) + 1.0));
  }
}

TEST_CASE("fourier convolution identity (Def 3b) on the desk m-grid") {
  GridShape shape = small_shape();
  shape.m_max = 56.0;
  shape.n_m = 129;
  BorelGrid g = make_borel_grid(shape, 0.0, cplx(0.0, 0.0));
  MLine f = mline_from_grid(g), gg = mline_from_grid(g), conv = mline_from_grid(g);
  const double dm = g.m_step;
  for (std::size_t j = 0; j < f.m.size(); ++j) {
    f.v[j] = std::exp(-std::abs(f.m[j])) / (1.0 + f.m[j] * f.m[j]);
    gg.v[j] = std::exp(-0.8 * std::abs(f.m[j])) * std::cos(0.5 * f.m[j]) /
              std::pow(1.0 + std::abs(f.m[j]), 2.0);
  }
  // psi = (2pi)^{-1/2} (f * g) by the same trapezoid sum, zero extension
  const std::ptrdiff_t nm = static_cast<std::ptrdiff_t>(f.m.size());
  const std::ptrdiff_t c = (nm - 1) / 2;
  for (std::ptrdiff_t j = 0; j < nm; ++j) {
    cplx acc(0.0, 0.0);
    for (std::ptrdiff_t j1 = 0; j1 < nm; ++j1) {
      const std::ptrdiff_t idx = j - j1 + c;
      if (idx < 0 || idx >= nm) continue;
      acc += f.v[idx] * gg.v[j1];
    }
    conv.v[j] = acc * dm / std::sqrt(2.0 * pi);
  }
  for (const cplx z : {cplx(0.0, 0.0), cplx(1.1, 0.3), cplx(-0.7, -0.2)}) {
    const cplx lhs = fourier_inverse(f, z, 1.0).value * fourier_inverse(gg, z, 0.8).value;
    const cplx rhs = fourier_inverse(conv, z, 0.8).value;
    CHECK(std::abs(lhs - rhs) <= 1e-5 * (std::abs(lhs) + 1e-6));
  }
}

TEST_CASE("fourier rejects |Im z| >= beta") {
  MLine f;
  f.m = {-1.0, 0.0, 1.0};
  f.v = {cplx(1, 0), cplx(1, 0), cplx(1, 0)};
  CHECK_THROWS_AS(fourier_inverse(f, cplx(0.0, 1.0), 1.0), numeric_error);
}

TEST_CASE("norm_beta_mu: exact cancellation, zero, homogeneity") {
  MLine f;
  const double beta = 1.0, mu = 2.5;
  for (int j = -40; j <= 40; ++j) {
    const double m = 0.5 * j;
    f.m.push_back(m);
    f.v.push_back(std::pow(1.0 + std::abs(m), -mu) * std::exp(-beta * std::abs(m)));
  }
  CHECK(norm_beta_mu(f, beta, mu) == doctest::Approx(1.0).epsilon(1e-13));

  MLine z = f;
  for (auto& v : z.v) v = 0.0;
  CHECK(norm_beta_mu(z, beta, mu) == 0.0);

  MLine scaled = f;
  for (auto& v : scaled.v) v *= cplx(0.0, -3.0);
  CHECK(norm_beta_mu(scaled, beta, mu) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("norm_f: envelope realiser has unit norm; subadditive, monotone") {
  GridShape shape = small_shape();
  BorelGrid g = make_borel_grid(shape, 0.2, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    const double rk = std::pow(g.radial.nodes[i], g.k);
    for (std::size_t j = 0; j < g.n_m(); ++j) {
      const double am = std::abs(g.m_nodes[j]);
      g.at(i, j) = rk / (1.0 + rk * rk) * std::exp(g.nu * rk) *
                   std::pow(1.0 + am, -g.mu) * std::exp(-g.beta * am);
    }
  }
  CHECK(norm_f(g) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(norm_f(zero_like(g)) == 0.0);

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    BorelGrid a = zero_like(g), b = zero_like(g);
    for (std::size_t t = 0; t < a.values.size(); ++t) {
      a.values[t] = cplx(u(rng), u(rng)) * g.values[t];
      b.values[t] = cplx(u(rng), u(rng)) * g.values[t];
    }
    BorelGrid s = a;
    add_scaled(s, cplx(1.0, 0.0), b);
    CHECK(norm_f(s) <= norm_f(a) + norm_f(b) + 1e-12);
    BorelGrid dom = a;
    for (auto& v : dom.values) v *= 2.0;
    CHECK(norm_f(a) <= norm_f(dom) + 1e-12);
  }
}
