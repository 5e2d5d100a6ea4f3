#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "borelsum/types.hpp"

namespace borelsum {

/// Composite quadrature mesh on (0, r_max]: a first panel [0, r_min]
/// followed by geometrically graded panels, Gauss-Legendre nodes inside
/// each panel. Node weights integrate f over [0, r_max] in dr.
/// An optional `break_at` radius is forced to be a panel boundary so that
/// integrals over [0, break] and [break, r_max] split exactly.
struct RadialRule {
  double r_max = 0.0;
  double r_min = 0.0;
  int nodes_per_panel = 8;
  std::vector<double> boundaries;  // panel boundaries, 0 = first, r_max = last
  std::vector<double> nodes;       // strictly increasing
  std::vector<double> weights;
  std::optional<double> break_at;
  std::size_t break_node = 0;  // first node index at or beyond break_at

  std::size_t size() const { return nodes.size(); }
};

RadialRule make_radial_rule(double r_max, int panels, int nodes_per_panel,
                            double r_min_frac = 1e-4,
                            std::optional<double> break_at = std::nullopt);

/// Truncation of `rule` to the panels up to (and including) the one that
/// starts at `rule.break_at`; used for cut-disc (fan) grids so their nodes
/// coincide with the parent rule's.
RadialRule truncate_after_break(const RadialRule& rule);

/// 4-point local Lagrange interpolation stencil in the radius. Queries below
/// the first node or above the last extrapolate from the edge stencil (exact
/// for cubic data; the zone below the first node is measure-tiny).
struct InterpStencil {
  std::size_t first = 0;  // first node index of the stencil
  double w[4] = {0, 0, 0, 0};
};

InterpStencil interp_stencil(const RadialRule& rule, double q);

/// Shared shape of the discretisation: radial mesh parameters, Fourier grid
/// and the Banach-space metadata (nu, beta, mu, k, rho).
struct GridShape {
  double r_max = 5.0;
  int panels = 25;
  int nodes_per_panel = 8;
  double r_min_frac = 1e-4;
  std::optional<double> break_at;
  double m_max = 56.0;
  int n_m = 129;  // odd, symmetric about 0
  double nu = 1.5;
  double beta = 1.0;
  double mu = 2.5;
  double k = 0.75;
  double rho = 0.4;
};

/// Values of a Borel-plane map w(tau, m) sampled on one ray
/// tau = r e^{i gamma}, r over the radial rule, m over a uniform grid.
struct BorelGrid {
  double gamma = 0.0;
  RadialRule radial;
  std::vector<double> m_nodes;
  double m_step = 0.0;
  double nu = 0.0, beta = 0.0, mu = 0.0, k = 0.0, rho = 0.0;
  cplx eps{0.0, 0.0};
  std::vector<cplx> values;  // row-major: values[i * n_m + j]

  std::size_t n_r() const { return radial.size(); }
  std::size_t n_m() const { return m_nodes.size(); }
  cplx& at(std::size_t i, std::size_t j) { return values[i * n_m() + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return values[i * n_m() + j]; }

  double max_abs() const;
};

BorelGrid make_borel_grid(const GridShape& shape, double gamma, cplx eps);

/// Returns a grid with the same layout and zero values.
BorelGrid zero_like(const BorelGrid& g);

/// y += a*x (same layout required).
void add_scaled(BorelGrid& y, cplx a, const BorelGrid& x);

/// Function values h(m) on the shared Fourier grid.
struct MLine {
  std::vector<double> m;
  std::vector<cplx> v;
};

MLine mline_from_grid(const BorelGrid& g);  // layout only, zero values

/// Persistence: CSV with a metadata header then rows (r, m, re, im), plus a
/// companion JSON (same path with ".json" appended) recording the shape.
void save_grid_csv(const BorelGrid& g, const GridShape& shape, const std::string& path);
std::pair<BorelGrid, GridShape> load_grid_csv(const std::string& path);

}  // namespace borelsum
