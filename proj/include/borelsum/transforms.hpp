#pragma once

#include "borelsum/grid.hpp"
#include "borelsum/types.hpp"

namespace borelsum {

struct LaplaceOptions {
  double delta1_min = 0.05;  // admissibility floor for cos(k(gamma - arg T))
  double trunc_tol = 1e-6;   // relative truncation bound that triggers an error
  bool enforce_trunc = true;
};

struct LaplaceResult {
  cplx value{0.0, 0.0};
  double cos_margin = 0.0;      // cos(k(gamma - arg T))
  double trunc_estimate = 0.0;  // absolute bound on the dropped [r_max, inf) tail
};

/// Laplace transform of order k along the grid ray (the du/u normalisation):
///   k int_{L_gamma} w(u, m_j) exp(-(u/T)^k) du/u
/// for one Fourier index j. `from_node` restricts the radial range to
/// nodes >= from_node (used for the truncated path integrals).
LaplaceResult laplace_k(const BorelGrid& w, std::size_t j, cplx T,
                        const LaplaceOptions& opts = {}, std::size_t from_node = 0);

/// All Fourier indices at once; values share the admissibility check.
MLine laplace_k_all(const BorelGrid& w, cplx T, const LaplaceOptions& opts = {},
                    std::size_t from_node = 0);

/// Laplace transform of order k in the summability normalisation
///   eps^{-k} int_{L_gamma} v(u) exp(-(u/eps)^k) k u^{k-1} du
/// for a scalar ray function v given by samples on the rule. Used by the
/// Borel/Laplace roundtrip diagnostics; never mixed with laplace_k.
cplx laplace_series_k(const RadialRule& rule, double gamma, double k,
                      const std::vector<cplx>& v, cplx eps);

/// Formal Borel transform of order k: a_j -> a_j / Gamma(1 + j/k).
std::vector<cplx> borel_k(const std::vector<cplx>& coeffs, double k);

struct FourierResult {
  cplx value{0.0, 0.0};
  double tail_estimate = 0.0;
};

/// Inverse Fourier transform (2 pi)^{-1/2} int f(m) e^{izm} dm by the
/// trapezoid rule on the uniform m-grid. Requires |Im z| < beta.
FourierResult fourier_inverse(const MLine& f, cplx z, double beta);

struct NormDiag {
  bool boundary = false;  // max attained at the first/last node
  std::size_t arg_r = 0, arg_m = 0;
};

/// sup over nodes of (1+|m|)^mu e^{beta |m|} |f(m)|.
double norm_beta_mu(const MLine& f, double beta, double mu, NormDiag* diag = nullptr);

/// sup over nodes of (1+|m|)^mu (1+|tau|^{2k})/|tau|^k e^{beta|m| - nu|tau|^k} |w|.
double norm_f(const BorelGrid& w, NormDiag* diag = nullptr);

}  // namespace borelsum
