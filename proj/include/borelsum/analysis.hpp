#pragma once

#include <optional>
#include <vector>

#include "borelsum/geometry.hpp"
#include "borelsum/solver.hpp"

namespace borelsum {

struct ReconstructOptions {
  LaplaceOptions laplace;
  bool check_membership = true;  // require eps*t inside the associated sector
};

/// u_p(t, z, eps) = k (2pi)^{-1/2} int int w e^{-(u/(eps t))^k} e^{izm} du/u dm
/// via the grid's Laplace quadrature composed with the Fourier trapezoid.
cplx reconstruct_u(const BorelGrid& w, const ProblemSpec& spec, const CoveringData& cov,
                   int p, cplx t, cplx z, cplx eps, const ReconstructOptions& opts = {});

/// Solutions of the convolution equation on short rays between two Borel
/// directions, radius just past rho/2; columns share the parent grids'
/// radial nodes so the three-path decomposition splits exactly.
struct DiscFan {
  std::vector<double> thetas;      // Chebyshev-Lobatto directions, ascending or descending
  std::vector<BorelGrid> columns;  // solved grids per direction
  double rho_half = 0.0;
  double consistency = 0.0;  // interior-extrapolation vs endpoint deviation (relative)
};

/// Solves the cut-disc restrictions along interior directions; endpoint
/// columns are the full solutions truncated after the rho/2 panel.
DiscFan solve_disc_fan(const ProblemSpec& spec, const BorelGrid& w_lo, const BorelGrid& w_hi,
                       int n_rays, const SolveOptions& opts);

struct PathDecomposition {
  cplx i1{0.0, 0.0};      // outer ray integral, direction gamma_{p+1}
  cplx i2{0.0, 0.0};      // minus the outer ray integral, direction gamma_p
  cplx i3{0.0, 0.0};      // arc integral at radius rho/2
  cplx direct{0.0, 0.0};  // u_{p+1} - u_p by full reconstruction
  double defect() const { return std::abs(i1 + i2 + i3 - direct); }
};

/// The Cauchy three-path decomposition of u_{p+1} - u_p at one (t, z, eps).
PathDecomposition difference_paths(const BorelGrid& w_p, const BorelGrid& w_p1,
                                   const DiscFan& fan, const ProblemSpec& spec,
                                   const CoveringData& cov, int p, cplx t, cplx z, cplx eps,
                                   const ReconstructOptions& opts = {});

struct SweepRow {
  double eps_abs = 0.0;
  double eps_arg = 0.0;
  double supdiff = 0.0;
  double max_u = 0.0;
  double noise_estimate = 0.0;
  double path_defect = 0.0;      // max |I1+I2+I3 - direct| over the (t,z) grid
  double path_direct = 0.0;      // |direct| at the defect maximiser
  int iterations_lo = 0, iterations_hi = 0;
  bool ok = false;
  std::string error;
};

struct SweepOptions {
  int n_eps = 10;
  double eps_abs_lo = 0.01;
  double eps_abs_hi = 0.1;
  std::optional<double> eps_arg;  // default: center of the overlap
  int n_t = 8;                    // 4 radii x 2 arguments
  int n_z = 8;                    // 4 real parts x 2 imaginary parts
  double sigma_factor = 0.5;      // sigma' = factor * (delta1/(delta2+nu eps0^k))^{1/k}
  int fan_rays_min = 8;
  SolveOptions solve;
  bool with_paths = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double sigma_prime = 0.0;
  double delta1 = 0.0;
  std::vector<cplx> t_grid, z_grid;
  int overlap_index = 0;
};

/// Solves both neighbouring directions per eps and tabulates
/// sup_{(t,z)} |u_{p+1} - u_p| together with the path-decomposition defect.
SweepResult flatness_sweep(const ProblemSpec& spec, const CoveringData& cov, int p,
                           const GridShape& shape, const SweepOptions& opts = {});

struct GevreyFit {
  double log_k = 0.0;  // fitted log K_p
  double m_rate = 0.0; // fitted M_p
  double r2 = 0.0;
  double kappa_hat = 0.0;
  double kappa_r2 = 0.0;
  int rows_used = 0;
  std::vector<std::pair<double, double>> scan;  // (kappa, R^2)
};

/// Least squares of log(supdiff) against |eps|^{-k}, plus the order scan
/// re-fitting over kappa and returning the best-quality exponent.
GevreyFit gevrey_fit(const std::vector<SweepRow>& rows, double k,
                     double kappa_lo = 0.0, double kappa_hi = 0.0);

struct AsymptoticSeries {
  // h_m values per (t,z)-sample point: coeffs[m][point]
  std::vector<std::vector<cplx>> coeffs;
  std::vector<double> sup_abs;  // sup over points of |h_m|
  double growth_c = 0.0, growth_m = 0.0, growth_resid = 0.0;
  double cond_estimate = 0.0;
};

/// Least-squares extraction of the epsilon-expansion coefficients from
/// samples u(eps_s) at fixed (t,z) points, with the Gevrey-growth report
/// |h_m| <= C M^m Gamma(1 + m/k).
AsymptoticSeries asymptotic_coefficients(const std::vector<cplx>& eps_samples,
                                         const std::vector<std::vector<cplx>>& u_samples,
                                         int order, double k);

}  // namespace borelsum
