#include "borelsum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "borelsum/convolution.hpp"

namespace borelsum {

cplx log_ratio_branch(const ProblemSpec& spec, double m, int l) {
  const cplx q = spec.Q.eval_im(m);
  const cplx rd = spec.RD.eval_im(m);
  if (std::abs(q) < 1e-300 || std::abs(rd) < 1e-300)
    throw numeric_error("log_ratio_branch: Q(im) or RD(im) vanishes at m = " + std::to_string(m));
  const cplx ratio = q / rd;
  return {std::log(std::abs(ratio)), std::arg(ratio) + 2.0 * pi * l};
}

cplx singularity_point(const ProblemSpec& spec, double m, int l) {
  const cplx a = log_ratio_branch(spec, m, l);
  if (a.real() <= 0.0)
    throw numeric_error("singularity_point: |Q/RD| <= 1 (needs r1 > 1), branch undefined");
  const double k = spec.k;
  const double mod = std::pow(std::abs(a) / (spec.alpha_D * k), 1.0 / k);
  return std::polar(mod, std::arg(a) / k);
}

std::vector<ForbiddenInterval> forbidden_directions(const ProblemSpec& spec,
                                                    const std::vector<double>& m_grid,
                                                    int l_range, double margin) {
  std::vector<ForbiddenInterval> out;
  for (int l = -l_range; l <= l_range; ++l) {
    double lo = 1e300, hi = -1e300;
    for (double m : m_grid) {
      const cplx a = log_ratio_branch(spec, m, l);
      const double dir = std::arg(a) / spec.k;
      lo = std::min(lo, dir);
      hi = std::max(hi, dir);
    }
    ForbiddenInterval fi;
    fi.lo = lo - margin;
    fi.hi = hi + margin;
    fi.l = l;
    fi.blocking = fi.hi > -0.5 * pi && fi.lo < 0.5 * pi;
    out.push_back(fi);
  }
  std::sort(out.begin(), out.end(),
            [](const ForbiddenInterval& a, const ForbiddenInterval& b) { return a.lo < b.lo; });
  return out;
}

cplx h_value(const ProblemSpec& spec, cplx tau, double m) {
  cplx tk;
  if (tau == cplx(0.0, 0.0))
    tk = 0.0;
  else
    tk = principal_pow(tau, spec.k);  // errors on the cut
  return spec.Q.eval_im(m) - std::exp(spec.alpha_D * spec.k * tk) * spec.RD.eval_im(m);
}

namespace {

double clearance_to_forbidden(double d, const std::vector<ForbiddenInterval>& forb) {
  double c = 1e300;
  for (const auto& fi : forb) {
    if (!fi.blocking) continue;
    if (d >= fi.lo && d <= fi.hi) return 0.0;
    c = std::min(c, std::min(std::abs(d - fi.lo), std::abs(d - fi.hi)));
  }
  return c;
}

}  // namespace

CoveringData plan_covering(const ProblemSpec& spec, const std::vector<double>& m_grid,
                           const CoveringOptions& opts) {
  if (opts.varsigma < 2) throw validation_error("plan_covering: varsigma >= 2 required");
  const double k = spec.k;
  CoveringData cov;
  cov.varsigma = opts.varsigma;
  cov.eps0 = spec.eps0;
  cov.sector_aperture = opts.sector_aperture;
  cov.theta = opts.theta > 0.0 ? opts.theta : pi / k + 0.25;
  if (cov.theta <= pi / k)
    throw validation_error("plan_covering: theta must exceed pi/k");
  cov.time_sector = {0.0, opts.time_aperture, opts.r_time};

  const auto forb = forbidden_directions(spec, m_grid, opts.l_range, opts.margin);

  // smallest singularity modulus controls the admissible disc radius
  double min_tau = 1e300;
  for (int l = -opts.l_range; l <= opts.l_range; ++l)
    for (double m : m_grid)
      min_tau = std::min(min_tau, std::abs(singularity_point(spec, m, l)));
  cov.min_singularity = min_tau;
  cov.rho = opts.rho;
  if (cov.rho >= min_tau) {
    cov.rho = 0.5 * min_tau;
    cov.warnings.push_back("plan_covering: rho shrunk to " + std::to_string(cov.rho) +
                           " below min |tau_l| = " + std::to_string(min_tau));
  }

  // E_p apertures: equal sectors widened to overlap, or one wide sector when
  // the k-summability configuration is requested
  std::vector<double> apertures(opts.varsigma, 2.0 * pi / opts.varsigma * (1.0 + opts.overlap_frac));
  if (opts.wide_first) {
    apertures[0] = pi / k + 0.1;
    const double rest = (2.0 * pi - pi / k - 0.1) / (opts.varsigma - 1);
    for (int p = 1; p < opts.varsigma; ++p) apertures[p] = rest * (1.0 + opts.overlap_frac);
  }
  std::vector<double> centers(opts.varsigma);
  if (opts.wide_first) {
    // center E_0 on the clearest admissible Borel direction, spread the rest
    const double edge0 = 0.5 * pi - 0.5 * opts.sector_aperture;
    double best_d = 0.0, best_c = -1.0;
    for (int s = 0; s <= 2000; ++s) {
      const double d = -edge0 + 2.0 * edge0 * s / 2000;
      const double c = clearance_to_forbidden(d, forb);
      if (c > best_c + 1e-12) {
        best_c = c;
        best_d = d;
      }
    }
    centers[0] = best_d;
    for (int p = 1; p < opts.varsigma; ++p)
      centers[p] = wrap_angle(best_d + 0.5 * apertures[0] +
                              (p - 0.5) * (2.0 * pi - apertures[0]) / (opts.varsigma - 1));
  } else {
    for (int p = 0; p < opts.varsigma; ++p)
      centers[p] = wrap_angle(-pi + (2.0 * p + 1.0) * pi / opts.varsigma);
  }
  for (int p = 0; p < opts.varsigma; ++p)
    cov.eps_sectors.push_back({centers[p], apertures[p], spec.eps0});

  // Borel directions: inside (-pi/2, pi/2), within the window that keeps
  // E_p * T inside S_{d_p, theta}, maximal clearance from forbidden rays.
  const double edge = 0.5 * pi - 0.5 * opts.sector_aperture;
  for (int p = 0; p < opts.varsigma; ++p) {
    const double half_window =
        0.5 * cov.theta - 0.5 * opts.time_aperture - 0.5 * apertures[p] - 0.02;
    if (half_window <= 0.0)
      throw validation_error("plan_covering: E_p aperture too wide for theta");
    double best_d = 0.0, best_clear = -1.0;
    const int steps = 2000;
    for (int s = 0; s <= steps; ++s) {
      const double d = -edge + 2.0 * edge * s / steps;
      if (std::abs(wrap_angle(centers[p] - d)) > half_window) continue;
      const double c = clearance_to_forbidden(d, forb);
      if (c > best_clear + 1e-12) {
        best_clear = c;
        best_d = d;
      }
    }
    if (best_clear <= 0.5 * opts.sector_aperture)
      throw validation_error(
          "plan_covering: no admissible direction for sector p = " + std::to_string(p) +
          " (gap too narrow in (-pi/2, pi/2))");
    cov.directions.push_back(best_d);
  }

  // ---- sampled verification of the covering invariants ----
  std::ostringstream checks;
  {
    bool overlaps = true, triples = true, covers = true;
    const int n_ang = 4096;
    for (int a = 0; a < n_ang; ++a) {
      const double ang = -pi + 2.0 * pi * (a + 0.5) / n_ang;
      int count = 0;
      for (int p = 0; p < opts.varsigma; ++p)
        if (cov.eps_sectors[p].contains_angle(ang)) ++count;
      if (count == 0) covers = false;
      if (count >= 3) triples = false;
    }
    for (int p = 0; p < opts.varsigma; ++p) {
      const auto& a = cov.eps_sectors[p];
      const auto& b = cov.eps_sectors[(p + 1) % opts.varsigma];
      const double gap = std::abs(wrap_angle(a.direction - b.direction));
      if (gap >= 0.5 * (a.aperture + b.aperture)) overlaps = false;
    }
    checks << "cyclic overlaps nonempty: " << (overlaps ? "pass" : "FAIL") << "\n";
    checks << "no triple intersections (sampled): " << (triples ? "pass" : "FAIL") << "\n";
    checks << "union covers punctured neighborhood (sampled): " << (covers ? "pass" : "FAIL")
           << "\n";
    if (!overlaps || !triples || !covers)
      throw validation_error("plan_covering: covering invariants failed:\n" + checks.str());
  }
  {
    bool clear = true;
    for (int p = 0; p < opts.varsigma && clear; ++p)
      for (int l = -opts.l_range; l <= opts.l_range && clear; ++l)
        for (double m : m_grid) {
          const cplx tl = singularity_point(spec, m, l);
          const bool in_sector =
              std::abs(wrap_angle(std::arg(tl) - cov.directions[p])) <=
              0.5 * opts.sector_aperture + opts.margin;
          if ((in_sector && std::abs(tl) > 0.0) || std::abs(tl) <= cov.rho) {
            clear = false;
            break;
          }
        }
    checks << "tau_l outside S_d and D(0,rho): " << (clear ? "pass" : "FAIL") << "\n";
    if (!clear) throw validation_error("plan_covering: tau_l clearance failed");
  }
  {
    bool member = true;
    for (int p = 0; p < opts.varsigma && member; ++p) {
      const auto& ep = cov.eps_sectors[p];
      for (int ia = -2; ia <= 2 && member; ++ia)
        for (int ta = -2; ta <= 2; ++ta) {
          const double ae = ep.direction + 0.5 * ep.aperture * ia / 2.0 * 0.999;
          const double at = cov.time_sector.direction +
                            0.5 * cov.time_sector.aperture * ta / 2.0 * 0.999;
          const double prod_arg = wrap_angle(ae + at);
          const double prod_mod = 0.9 * spec.eps0 * 0.9 * cov.time_sector.radius;
          if (std::abs(wrap_angle(prod_arg - cov.directions[p])) > 0.5 * cov.theta ||
              prod_mod >= spec.eps0 * cov.time_sector.radius) {
            member = false;
            break;
          }
        }
    }
    checks << "eps*t inside S_{d_p,theta,eps0 rT} (sampled): " << (member ? "pass" : "FAIL")
           << "\n";
    if (!member) throw validation_error("plan_covering: eps*t membership failed");
  }
  cov.checks.push_back(checks.str());
  return cov;
}

HBoundEstimates estimate_h_bounds(const ProblemSpec& spec, double direction, double aperture,
                                  double rho, const BorelGrid& grid_template,
                                  const HBoundOptions& opts) {
  const double k = spec.k;
  HBoundEstimates est;

  // ---- sector samples: edges and bisector of S_d over the radial nodes ----
  struct Sample {
    double x, y;  // x = alpha_D |tau|^k, y = ln(|H|/|Q|)
  };
  std::vector<Sample> samples;
  double min_ratio = 1e300;
  const double rays[3] = {direction - 0.5 * aperture, direction, direction + 0.5 * aperture};
  for (double gamma : rays) {
    for (double r : grid_template.radial.nodes) {
      const cplx tau = std::polar(r, gamma);
      for (double m : grid_template.m_nodes) {
        const double q = std::abs(spec.Q.eval_im(m));
        const double ratio = std::abs(h_value(spec, tau, m)) / q;
        min_ratio = std::min(min_ratio, ratio);
        if (ratio > 0.0)
          samples.push_back({spec.alpha_D * std::pow(r, k), std::log(ratio)});
      }
    }
  }
  est.min_ratio_sector = min_ratio;
  if (min_ratio < opts.floor)
    throw numeric_error("estimate_h_bounds: H vanishes on the sampled sector "
                        "(direction too close to singular rays)");

  // lower-envelope slope: min of y per x-bin, least squares through the mins
  double x_hi = 0.0;
  for (const auto& s : samples) x_hi = std::max(x_hi, s.x);
  std::vector<double> bin_min(opts.x_bins, 1e300), bin_x(opts.x_bins, 0.0);
  std::vector<int> bin_n(opts.x_bins, 0);
  for (const auto& s : samples) {
    int b = std::min(opts.x_bins - 1, static_cast<int>(s.x / x_hi * opts.x_bins));
    if (s.y < bin_min[b]) bin_min[b] = s.y;
    bin_x[b] += s.x;
    bin_n[b] += 1;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int nb = 0;
  for (int b = 0; b < opts.x_bins; ++b) {
    if (bin_n[b] == 0) continue;
    const double x = bin_x[b] / bin_n[b], y = bin_min[b];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++nb;
  }
  if (nb < 3) throw numeric_error("estimate_h_bounds: too few sample bins");
  const double slope = (nb * sxy - sx * sy) / (nb * sxx - sx * sx);
  if (slope <= 0.0)
    throw numeric_error("estimate_h_bounds: fitted growth slope not positive");
  est.B = opts.safety * slope;
  double a_min = 1e300;
  for (const auto& s : samples) a_min = std::min(a_min, std::exp(s.y - est.B * s.x));
  est.A = a_min;
  if (!(est.A > 0.0))
    throw numeric_error("estimate_h_bounds: fitted A_{H,d} not positive");

  // ---- cut disc: eta2 = min |H|/|Q| over D(0,rho) minus the cut ----
  double eta2 = 1e300;
  for (int ir = 1; ir <= opts.disc_radii; ++ir) {
    const double r = rho * ir / opts.disc_radii;
    for (int ia = 0; ia < opts.disc_angles; ++ia) {
      const double ang = -pi + 2.0 * pi * (ia + 0.5) / opts.disc_angles;
      const cplx tau = std::polar(r, ang);
      for (double m : grid_template.m_nodes) {
        const double q = std::abs(spec.Q.eval_im(m));
        eta2 = std::min(eta2, std::abs(h_value(spec, tau, m)) / q);
      }
    }
  }
  est.eta2 = eta2;

  est.k1 = estimate_k1(k, grid_template.nu, make_k1_samples(grid_template));
  const double unit = k / std::tgamma(1.0 / k - 1.0);
  for (const auto& lv : spec.levels)
    est.margins.push_back(est.B * spec.alpha_D - lv.kappa * est.k1 * unit);
  return est;
}

std::vector<BorelGrid> make_k1_samples(const BorelGrid& grid_template) {
  std::vector<BorelGrid> samples;
  const double k = grid_template.k;
  // Def-4 envelope realiser and the plain |tau|^k ray monomial
  BorelGrid env = zero_like(grid_template);
  BorelGrid mono = zero_like(grid_template);
  const std::size_t nm = env.n_m();
  for (std::size_t i = 0; i < env.n_r(); ++i) {
    const double rk = std::pow(env.radial.nodes[i], k);
    const cplx tau_k = ray_pow(env.radial.nodes[i], env.gamma, k);
    for (std::size_t j = 0; j < nm; ++j) {
      const double am = std::abs(env.m_nodes[j]);
      const double profile = std::pow(1.0 + am, -env.mu) * std::exp(-env.beta * am);
      env.at(i, j) = rk / (1.0 + rk * rk) * std::exp(env.nu * rk) * profile;
      mono.at(i, j) = tau_k * profile;
    }
  }
  samples.push_back(std::move(env));
  samples.push_back(std::move(mono));
  return samples;
}

}  // namespace borelsum
