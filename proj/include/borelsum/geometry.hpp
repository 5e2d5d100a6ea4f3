#pragma once

#include <optional>
#include <string>
#include <vector>

#include "borelsum/grid.hpp"
#include "borelsum/problem.hpp"
#include "borelsum/types.hpp"

namespace borelsum {

struct Sector {
  double direction = 0.0;
  double aperture = 0.0;
  double radius = 0.0;  // infinity() for unbounded sectors

  bool contains_angle(double a) const {
    return std::abs(wrap_angle(a - direction)) <= 0.5 * aperture;
  }
  bool contains(cplx z) const {
    return std::abs(z) < radius && contains_angle(std::arg(z));
  }
};

/// Interval of ray arguments arg(a_l(m))/k swept by one branch index l.
struct ForbiddenInterval {
  double lo = 0.0, hi = 0.0;
  int l = 0;
  bool blocking = false;  // overlaps the admissible band (-pi/2, pi/2)
};

struct CoveringData {
  int varsigma = 0;
  double eps0 = 0.0;
  std::vector<Sector> eps_sectors;   // E_p, radius eps0
  std::vector<double> directions;    // Borel directions d_p in (-pi/2, pi/2)
  double sector_aperture = 0.0;      // aperture of the unbounded S_{d_p}
  Sector time_sector;                // T: direction 0
  double theta = 0.0;                // aperture of the associated eps*t sectors
  double rho = 0.0;                  // cut-disc radius
  double min_singularity = 0.0;      // min_l,m |tau_l|
  std::vector<std::string> checks;
  diagnostics warnings;
};

struct HBoundEstimates {
  double A = 0.0;       // A_{H,d}
  double B = 0.0;       // B_{H,d}
  double eta2 = 0.0;    // min over the cut disc of |H| / |Q(im)|
  double k1 = 0.0;      // fitted K_1
  std::vector<double> margins;  // B alpha_D - kappa_l K_1 k / Gamma(1/k - 1) per level
  double min_ratio_sector = 0.0;  // min |H|/|Q| seen on the sector samples
};

/// a_l(m) = log|Q(im)/RD(im)| + i arg(Q(im)/RD(im)) + 2 l pi i.
cplx log_ratio_branch(const ProblemSpec& spec, double m, int l);

/// The root tau_l of alpha_D k tau^k = a_l(m) under the principal branch.
cplx singularity_point(const ProblemSpec& spec, double m, int l);

/// Per-branch intervals of arg(a_l(m))/k over the grid, dilated by `margin`.
std::vector<ForbiddenInterval> forbidden_directions(const ProblemSpec& spec,
                                                    const std::vector<double>& m_grid,
                                                    int l_range, double margin = 0.05);

/// H(tau, m) = Q(im) - exp(alpha_D k tau^k) RD(im), principal branch.
cplx h_value(const ProblemSpec& spec, cplx tau, double m);

struct CoveringOptions {
  int varsigma = 3;
  double theta = 0.0;          // 0 = auto: pi/k + 0.25
  double r_time = 0.5;         // radius of T
  double time_aperture = 0.1;  // aperture of T
  double rho = 0.4;            // requested cut-disc radius (shrunk if needed)
  double sector_aperture = 0.15;
  double overlap_frac = 0.15;  // relative widening of the E_p apertures
  int l_range = 8;
  double margin = 0.05;        // forbidden-interval dilation
  bool wide_first = false;     // give E_0 aperture slightly above pi/k
};

CoveringData plan_covering(const ProblemSpec& spec, const std::vector<double>& m_grid,
                           const CoveringOptions& opts = {});

struct HBoundOptions {
  int x_bins = 14;       // bins of the lower-envelope slope fit
  double safety = 0.9;   // multiplies the fitted slope
  int disc_radii = 24;   // cut-disc sampling resolution for eta2
  int disc_angles = 49;
  double floor = 1e-10;  // |H|/|Q| below this marks a singular ray
};

/// Samples |H|/|Q| on the sector (three rays: edges and bisector) and the cut
/// disc, fits the exponential lower bound and the contraction margins.
HBoundEstimates estimate_h_bounds(const ProblemSpec& spec, double direction,
                                  double aperture, double rho, const BorelGrid& grid_template,
                                  const HBoundOptions& opts = {});

/// Default probe functions for the K_1 fit on the template's layout.
std::vector<BorelGrid> make_k1_samples(const BorelGrid& grid_template);

}  // namespace borelsum
