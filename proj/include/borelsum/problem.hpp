#pragma once

#include <string>
#include <vector>

#include "borelsum/complex_poly.hpp"
#include "borelsum/grid.hpp"
#include "borelsum/types.hpp"

namespace borelsum {

/// One level l of the equation: the Moebius/derivative term
/// eps^{Delta_l} c_l a_l(t,eps) t^{d_l} R_l(d_z) d_t^{delta_l} u(t/(1+kappa_l eps t)).
struct Level {
  int index = 1;           // l, 1-based
  cplx c{0.0, 0.0};        // c_l
  int d = 0;               // d_l
  int delta = 1;           // delta_l
  int Delta = 0;           // Delta_l
  double kappa = 0.0;      // kappa_l > 0
  ComplexPolynomial R;     // R_l
  // A_l(T,eps) = sum_{n in I_l} A_{l,n}(eps) T^n; each A_{l,n} a polynomial in eps
  std::vector<std::pair<int, ComplexPolynomial>> A;
};

/// Modal factor of a forcing profile.
enum class ModalKind { cosine, sine };

/// One forcing profile F_n(m, eps) =
///   amplitude * (1+|m|)^{-mu'} * e^{-beta'|m|} * modal(omega m) * P(eps).
struct ForcingMode {
  int n = 1;  // power of T the mode multiplies (n >= 1)
  double amplitude = 0.0;
  double mu_prime = 0.0;    // must be >= forcing.mu
  double beta_prime = 0.0;  // must be >= forcing.beta
  ModalKind modal = ModalKind::cosine;
  double omega = 0.0;
  ComplexPolynomial eps_poly;

  cplx eval(double m, cplx eps) const;
  double profile(double m) const;  // |F_n| profile without the eps polynomial
};

struct ForcingSpec {
  std::vector<ForcingMode> modes;
  double K0 = 1.0;
  double T0 = 1.0;
  double beta = 1.0;
  double mu = 2.0;

  /// F_n(m, eps); zero when no mode carries index n.
  cplx eval(int n, double m, cplx eps) const;
  int max_n() const;
};

struct ProblemSpec {
  double k = 0.75;      // in (1/2, 1)
  int D = 2;            // >= 2
  double alpha_D = 1.0; // > 0
  cplx c12{0.0, 0.0};
  cplx cf{0.0, 0.0};
  ComplexPolynomial Q, Q1, Q2, RD;
  std::vector<Level> levels;  // l = 1 .. D-1
  ForcingSpec forcing;
  double eps0 = 0.1;
  int max_index_set = 16;  // cap on |I_l|
};

struct ValidationEntry {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  // measured annulus of Q(im)/RD(im) over the grid plus the |m|->inf limit
  double r1 = 0.0, r2 = 0.0, direction = 0.0, aperture = 0.0;
  bool passed() const;
  std::string summary() const;
};

/// Checks every hypothesis of the problem class on the supplied m-grid.
/// Violations are reported as failed entries; k outside (1/2, 1) is a hard
/// error since nothing downstream is meaningful there.
ValidationReport validate_spec(const ProblemSpec& spec, const std::vector<double>& m_grid);

/// d_{l,k} = d_l - delta_l (k+1) > 0.
double d_lk(const ProblemSpec& spec, int l);

/// Coefficients A_{delta,p}, p = 1..delta-1, of the expansion
/// T^{delta(k+1)} d_T^delta = (T^{k+1} d_T)^delta
///   + sum_p A_{delta,p} T^{k(delta-p)} (T^{k+1} d_T)^p.
std::vector<double> tahara_coefficients(int delta, double k);

struct ForcingPsiResult {
  BorelGrid grid;
  int terms_used = 0;
  double tail_estimate = 0.0;  // bound on the dropped tail at r_max
  diagnostics warnings;
};

/// psi(tau, m, eps) = sum_{n>=1} F_n(m, eps) tau^n / Gamma(n/k) on the grid
/// template. The series is truncated once the geometric tail-ratio bound
/// falls below `tail_tol` at the outer radius.
ForcingPsiResult forcing_psi(const ProblemSpec& spec, const BorelGrid& grid_template,
                             double tail_tol = 1e-12, int max_terms = 400);

}  // namespace borelsum
