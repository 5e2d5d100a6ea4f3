#pragma once

#include <memory>

#include "borelsum/convolution.hpp"
#include "borelsum/geometry.hpp"
#include "borelsum/grid.hpp"
#include "borelsum/problem.hpp"
#include "borelsum/transforms.hpp"

namespace borelsum {

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 60;
  int workers = 1;
  double exp_tol = 1e-12;  // series tolerance of exp(-kappa C_k)
  int exp_pmax = 60;
  double h_floor = 1e-14;  // |H| floor relative to |Q(im)|
  bool force = false;      // run even when the smallness ledger fails
};

/// Precomputed discrete operators of the fixed-point map on one grid layout:
/// 1/H at the nodes, the forcing, the per-level kernels and the C_k operator.
struct HepsWorkspace {
  const ProblemSpec* spec = nullptr;
  BorelGrid grid_template;  // layout carrier (values unused)
  BorelGrid psi;            // forcing term on the grid at this eps
  double psi_tail = 0.0;
  std::vector<cplx> h_val;    // H(tau_i, m_j)
  std::vector<cplx> h_inv;    // 1 / H
  std::vector<cplx> q_im, rd_im;          // Q(im_j), RD(im_j)
  std::vector<cplx> exp_alpha;            // exp(alpha_D k tau_i^k)
  std::vector<std::vector<cplx>> rl_im;   // R_l(im_j) per level
  ConvOperator ck;                        // C_k including its scale
  struct LevelKernel {
    int n = 0;
    cplx coeff;                 // eps^{Delta-d+delta} c_l A_{l,n}(eps) k^{delta}/Gamma(...)
    ConvOperator op;            // the leading (gamma2, delta-1) kernel
    struct Correction {
      cplx coeff;               // A_{delta,p} k^p / Gamma(...) times the level scalar
      ConvOperator op;
    };
    std::vector<Correction> corrections;
  };
  struct LevelOps {
    double kappa = 0.0;
    std::vector<LevelKernel> kernels;
  };
  std::vector<LevelOps> levels;
  SolveOptions opts;
};

/// Builds the workspace for one ray grid and one eps. Throws when |H| falls
/// below the floor at any node (direction too close to a singular ray).
HepsWorkspace make_heps_workspace(const ProblemSpec& spec, const BorelGrid& grid_template,
                                  const SolveOptions& opts = {});

/// One application of the fixed-point map H_eps.
BorelGrid apply_h_eps(const HepsWorkspace& ws, const BorelGrid& w);

struct IterationTrace {
  std::vector<double> iterate_norms;
  std::vector<double> diff_norms;
  std::vector<double> ratios;  // recorded while differences are above noise
  std::vector<double> wall_ms;
  int iterations = 0;
  bool converged = false;
  double final_diff = 0.0;
  double final_norm = 0.0;
};

struct SolveResult {
  BorelGrid w;
  IterationTrace trace;
};

/// Picard iteration of H_eps from w = 0 in the Def-4 norm.
SolveResult solve_fixed_point(const HepsWorkspace& ws);

/// Relative Def-4 norm of the raw equation residual
///   Q(im) w - e^{alpha_D k tau^k} RD(im) w - (right-hand side)(w),
/// assembled directly (not via the fixed-point map) and divided by
/// norm_f(Q(im) w).
double residual(const HepsWorkspace& ws, const BorelGrid& w);

struct SmallnessLedger {
  // probe-estimated constants
  double c3 = 0.0;
  double kf = 0.0;
  double eta2 = 0.0;
  double k1 = 0.0;
  double c5_max = 0.0, c7_max = 0.0;
  // condition coefficients: incl(x) = lin x + quad x^2 + force <= x,
  //                         shrink(x) = lin + 2 quad x <= 1/2
  double lin_coeff = 0.0;
  double quad_coeff = 0.0;
  double force_term = 0.0;
  double varpi = 0.0;  // smallest passing candidate (0 when failing)
  bool pass = false;

  double incl_lhs(double x) const { return lin_coeff * x + quad_coeff * x * x + force_term; }
  double shrink_lhs(double x) const { return lin_coeff + 2.0 * quad_coeff * x; }
};

/// Evaluates the two sufficient smallness conditions with probe-estimated
/// operator norms over a sweep of ball radii.
SmallnessLedger smallness_ledger(const ProblemSpec& spec, const HBoundEstimates& hbounds,
                                 const BorelGrid& grid_template,
                                 const std::vector<double>& varpi_candidates = {},
                                 int workers = 1);

}  // namespace borelsum
