#pragma once

#include <cstdint>
#include <vector>

#include "borelsum/complex_poly.hpp"
#include "borelsum/grid.hpp"
#include "borelsum/types.hpp"

namespace borelsum {

/// Exponents of the kernel tau^k int_0^{tau^k} (tau^k - s)^{g2} s^{g3} f(s^{1/k}) ds.
struct KernelParams {
  double gamma2 = 0.0;  // > -1
  double gamma3 = 0.0;  // >= 0
  double k = 0.75;      // in (1/2, 1)

  void validate() const;
  /// Whether k(gamma2 + gamma3 + 2) is a natural number (cut-disc
  /// analyticity condition); checked with tolerance, advisory only.
  bool cut_disc_natural(double tol = 1e-9) const;
};

/// A discrete convolution kernel on a fixed radial rule and ray: for each
/// output node, a complex prefactor and real weights on interpolation
/// stencil nodes (extended index 0 = virtual node at r = 0).
class ConvOperator {
 public:
  struct Term {
    std::uint32_t idx;
    double w;
  };
  struct Row {
    cplx prefactor;
    std::vector<Term> terms;
  };

  std::vector<Row> rows;
  cplx scale{1.0, 0.0};

  void apply(const BorelGrid& in, BorelGrid& out, int workers = 1) const;
  BorelGrid apply(const BorelGrid& in, int workers = 1) const;
};

/// Builds the discrete operator for conv_power_kernel on the grid's rule/ray.
/// `nodes` is the Gauss node count per s-panel (4 panels per output node).
ConvOperator make_conv_operator(const RadialRule& rule, double gamma,
                                const KernelParams& params, int nodes = 12);

/// C_{k,gamma2,gamma3}(w) on the grid's own ray.
BorelGrid conv_power_kernel(const BorelGrid& w, const KernelParams& params, int workers = 1);

/// Builds the operator for C_k = (k / Gamma(1/k - 1)) C_{k, 1/k - 2, 0}.
ConvOperator make_ck_operator(const RadialRule& rule, double gamma, double k, int nodes = 12);

BorelGrid c_k(const BorelGrid& w, int workers = 1);

struct ExpCkResult {
  BorelGrid grid;
  int terms = 0;            // highest series index p summed
  double tail_estimate = 0.0;
  std::vector<double> term_maxes;  // grid max of each series term
};

/// exp(-kappa C_k) w = sum_p (-kappa)^p / p! C_k^p w, truncated once the
/// term max falls below tol times the accumulated max.
ExpCkResult exp_neg_kappa_ck(const BorelGrid& w, double kappa, double tol = 1e-12,
                             int p_max = 60, int workers = 1);

/// Same, with a prebuilt C_k operator (reused across solver iterations).
ExpCkResult exp_neg_kappa_ck(const ConvOperator& ck, const BorelGrid& w, double kappa,
                             double tol = 1e-12, int p_max = 60, int workers = 1);

/// Smallest constant K1 (times `safety`) such that
///   |C_k^N f| <= C2 (k/Gamma(1/k-1))^N K1^N |tau|^{k(N+1)} e^{nu |tau|^k} (m profile)
/// holds for N = 1..n_max on all supplied samples.
double estimate_k1(double k, double nu, const std::vector<BorelGrid>& samples,
                   int n_max = 4, double safety = 1.1);

/// The nonlinear Fourier-Borel product
///   tau^k (2pi)^{-1/2} int_0^{tau^k} int Q1(i(m-m1)) w1((tau^k-s)^{1/k}, m-m1)
///     Q2(i m1) w2(s^{1/k}, m1) / ((tau^k - s) s) ds dm1
/// with the m1 integral a trapezoid sum on the shared uniform grid (zero
/// extension outside).
BorelGrid nonlinear_product(const BorelGrid& w1, const BorelGrid& w2,
                            const ComplexPolynomial& Q1, const ComplexPolynomial& Q2,
                            int workers = 1);

}  // namespace borelsum
