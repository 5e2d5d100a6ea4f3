#include "borelsum/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "borelsum/gauss.hpp"

namespace borelsum {

namespace {

// Appends `count` geometrically graded boundaries from a to b (a excluded).
void geometric_boundaries(double a, double b, int count, std::vector<double>& out) {
  const double q = std::pow(b / a, 1.0 / count);
  double r = a;
  for (int i = 1; i < count; ++i) {
    r *= q;
    out.push_back(r);
  }
  out.push_back(b);
}

}  // namespace

RadialRule make_radial_rule(double r_max, int panels, int nodes_per_panel,
                            double r_min_frac, std::optional<double> break_at) {
  if (r_max <= 0.0 || panels < 3 || nodes_per_panel < 2)
    throw validation_error("make_radial_rule: bad mesh parameters");
  RadialRule rule;
  rule.r_max = r_max;
  rule.r_min = r_min_frac * r_max;
  rule.nodes_per_panel = nodes_per_panel;
  rule.break_at = break_at;

  rule.boundaries.push_back(0.0);
  rule.boundaries.push_back(rule.r_min);
  const int geo_panels = panels - 1;
  if (break_at && *break_at > rule.r_min * 1.5 && *break_at < r_max * 0.95) {
    const double lo_span = std::log(*break_at / rule.r_min);
    const double hi_span = std::log(r_max / *break_at);
    int lo = std::max(2, static_cast<int>(std::lround(geo_panels * lo_span / (lo_span + hi_span))));
    lo = std::min(lo, geo_panels - 2);
    const int hi = geo_panels - lo;
    geometric_boundaries(rule.r_min, *break_at, lo, rule.boundaries);
    geometric_boundaries(*break_at, r_max, hi, rule.boundaries);
  } else {
    rule.break_at.reset();
    geometric_boundaries(rule.r_min, r_max, geo_panels, rule.boundaries);
  }

  for (std::size_t p = 0; p + 1 < rule.boundaries.size(); ++p) {
    const QuadRule gl = gauss_legendre(nodes_per_panel, rule.boundaries[p], rule.boundaries[p + 1]);
    for (int i = 0; i < nodes_per_panel; ++i) {
      rule.nodes.push_back(gl.x[i]);
      rule.weights.push_back(gl.w[i]);
    }
  }
  if (rule.break_at) {
    rule.break_node = static_cast<std::size_t>(
        std::lower_bound(rule.nodes.begin(), rule.nodes.end(), *rule.break_at) -
        rule.nodes.begin());
  }
  return rule;
}

RadialRule truncate_after_break(const RadialRule& rule) {
  if (!rule.break_at) throw validation_error("truncate_after_break: rule has no break");
  const double br = *rule.break_at;
  std::size_t q = 0;
  while (q < rule.boundaries.size() && rule.boundaries[q] < br * (1.0 - 1e-12)) ++q;
  // keep one panel past the break so the break radius is interior
  const std::size_t last_boundary = std::min(q + 1, rule.boundaries.size() - 1);
  RadialRule out = rule;
  out.boundaries.assign(rule.boundaries.begin(), rule.boundaries.begin() + last_boundary + 1);
  out.r_max = out.boundaries.back();
  const std::size_t n_nodes = (out.boundaries.size() - 1) * rule.nodes_per_panel;
  out.nodes.assign(rule.nodes.begin(), rule.nodes.begin() + n_nodes);
  out.weights.assign(rule.weights.begin(), rule.weights.begin() + n_nodes);
  return out;
}

InterpStencil interp_stencil(const RadialRule& rule, double q) {
  const std::size_t n = rule.nodes.size();
  if (n < 4) throw validation_error("interp_stencil: too few nodes");
  const std::size_t hi = static_cast<std::size_t>(
      std::lower_bound(rule.nodes.begin(), rule.nodes.end(), q) - rule.nodes.begin());
  std::size_t s = (hi >= 2) ? hi - 2 : 0;
  if (s + 4 > n) s = n - 4;
  InterpStencil st;
  st.first = s;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      w *= (q - rule.nodes[s + b]) / (rule.nodes[s + a] - rule.nodes[s + b]);
    }
    st.w[a] = w;
  }
  return st;
}

BorelGrid make_borel_grid(const GridShape& shape, double gamma, cplx eps) {
  if (shape.n_m < 3 || shape.n_m % 2 == 0)
    throw validation_error("make_borel_grid: n_m must be odd and >= 3");
  if (std::abs(gamma) >= pi)
    throw validation_error("make_borel_grid: ray direction on the cut");
  BorelGrid g;
  g.gamma = gamma;
  g.radial = make_radial_rule(shape.r_max, shape.panels, shape.nodes_per_panel,
                              shape.r_min_frac, shape.break_at);
  g.m_step = 2.0 * shape.m_max / (shape.n_m - 1);
  g.m_nodes.resize(shape.n_m);
  for (int j = 0; j < shape.n_m; ++j) g.m_nodes[j] = -shape.m_max + j * g.m_step;
  g.nu = shape.nu;
  g.beta = shape.beta;
  g.mu = shape.mu;
  g.k = shape.k;
  g.rho = shape.rho;
  g.eps = eps;
  g.values.assign(g.radial.size() * g.m_nodes.size(), cplx(0.0, 0.0));
  return g;
}

BorelGrid zero_like(const BorelGrid& g) {
  BorelGrid out = g;
  std::fill(out.values.begin(), out.values.end(), cplx(0.0, 0.0));
  return out;
}

void add_scaled(BorelGrid& y, cplx a, const BorelGrid& x) {
  if (y.values.size() != x.values.size())
    throw validation_error("add_scaled: incompatible grids");
  for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * x.values[i];
}

double BorelGrid::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

MLine mline_from_grid(const BorelGrid& g) {
  MLine line;
  line.m = g.m_nodes;
  line.v.assign(g.m_nodes.size(), cplx(0.0, 0.0));
  return line;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void save_grid_csv(const BorelGrid& g, const GridShape& shape, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "gamma,k,nu,beta,mu,rho,eps_re,eps_im\n";
  out << fmt(g.gamma) << ',' << fmt(g.k) << ',' << fmt(g.nu) << ',' << fmt(g.beta) << ','
      << fmt(g.mu) << ',' << fmt(g.rho) << ',' << fmt(g.eps.real()) << ',' << fmt(g.eps.imag())
      << "\n";
  out << "r,m,re,im\n";
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_m(); ++j)
      out << fmt(g.radial.nodes[i]) << ',' << fmt(g.m_nodes[j]) << ','
          << fmt(g.at(i, j).real()) << ',' << fmt(g.at(i, j).imag()) << "\n";

  nlohmann::json meta;
  meta["r_max"] = shape.r_max;
  meta["panels"] = shape.panels;
  meta["nodes_per_panel"] = shape.nodes_per_panel;
  meta["r_min_frac"] = shape.r_min_frac;
  if (shape.break_at) meta["break_at"] = *shape.break_at;
  meta["m_max"] = shape.m_max;
  meta["n_m"] = shape.n_m;
  meta["nu"] = shape.nu;
  meta["beta"] = shape.beta;
  meta["mu"] = shape.mu;
  meta["k"] = shape.k;
  meta["rho"] = shape.rho;
  meta["gamma"] = g.gamma;
  meta["eps_re"] = g.eps.real();
  meta["eps_im"] = g.eps.imag();
  std::ofstream jout(path + ".json");
  jout << meta.dump(2) << "\n";
}

std::pair<BorelGrid, GridShape> load_grid_csv(const std::string& path) {
  std::ifstream jin(path + ".json");
  if (!jin) throw std::runtime_error("cannot open " + path + ".json");
  nlohmann::json meta = nlohmann::json::parse(jin);
  GridShape shape;
  shape.r_max = meta.at("r_max");
  shape.panels = meta.at("panels");
  shape.nodes_per_panel = meta.at("nodes_per_panel");
  shape.r_min_frac = meta.at("r_min_frac");
  if (meta.contains("break_at")) shape.break_at = meta.at("break_at").get<double>();
  shape.m_max = meta.at("m_max");
  shape.n_m = meta.at("n_m");
  shape.nu = meta.at("nu");
  shape.beta = meta.at("beta");
  shape.mu = meta.at("mu");
  shape.k = meta.at("k");
  shape.rho = meta.at("rho");

  BorelGrid g = make_borel_grid(shape, meta.at("gamma"),
                                cplx(meta.at("eps_re"), meta.at("eps_im")));
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header names
  std::getline(in, line);  // header values
  std::getline(in, line);  // row header
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    for (std::size_t j = 0; j < g.n_m(); ++j) {
      if (!std::getline(in, line))
        throw std::runtime_error(path + ": truncated grid file");
      double r, m, re, im;
      if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg", &r, &m, &re, &im) != 4)
        throw std::runtime_error(path + ": bad row '" + line + "'");
      if (std::abs(r - g.radial.nodes[i]) > 1e-12 * (1.0 + r))
        throw std::runtime_error(path + ": radial nodes do not match metadata");
      g.at(i, j) = cplx(re, im);
    }
  }
  return {std::move(g), shape};
}

}  // namespace borelsum
