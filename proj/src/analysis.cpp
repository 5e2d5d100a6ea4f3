#include "borelsum/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "borelsum/gauss.hpp"

namespace borelsum {

namespace {

// m-line of a grid interpolated at radius q
std::vector<cplx> interp_radial_line(const BorelGrid& g, double q) {
  const InterpStencil st = interp_stencil(g.radial, q);
  const std::size_t nm = g.n_m();
  std::vector<cplx> line(nm, cplx(0.0, 0.0));
  for (int a = 0; a < 4; ++a) {
    if (st.first + a == 0 || st.w[a] == 0.0) continue;
    const cplx* src = &g.values[(st.first + a - 1) * nm];
    for (std::size_t j = 0; j < nm; ++j) line[j] += st.w[a] * src[j];
  }
  return line;
}

std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> b(n, 1.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = 0; c < n; ++c)
      if (a != c) b[a] /= (x[a] - x[c]);
  return b;
}

std::vector<double> barycentric_coeffs(const std::vector<double>& x,
                                       const std::vector<double>& b, double q) {
  const std::size_t n = x.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    if (q == x[a]) {
      c[a] = 1.0;
      return c;
    }
  }
  double denom = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    c[a] = b[a] / (q - x[a]);
    denom += c[a];
  }
  for (auto& v : c) v /= denom;
  return c;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  const double det = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace

cplx reconstruct_u(const BorelGrid& w, const ProblemSpec& spec, const CoveringData& cov,
                   int p, cplx t, cplx z, cplx eps, const ReconstructOptions& opts) {
  (void)spec;
  const cplx T = eps * t;
  if (opts.check_membership) {
    const double dp = cov.directions.at(p);
    if (std::abs(T) >= cov.eps0 * cov.time_sector.radius ||
        std::abs(wrap_angle(std::arg(T) - dp)) > 0.5 * cov.theta)
      throw numeric_error("reconstruct_u: eps*t outside the associated sector");
  }
  const MLine L = laplace_k_all(w, T, opts.laplace);
  return fourier_inverse(L, z, w.beta).value;
}

DiscFan solve_disc_fan(const ProblemSpec& spec, const BorelGrid& w_lo, const BorelGrid& w_hi,
                       int n_rays, const SolveOptions& opts) {
  if (!w_lo.radial.break_at || !w_hi.radial.break_at)
    throw validation_error("solve_disc_fan: grids need a radial break at rho/2");
  if (w_lo.radial.nodes.size() != w_hi.radial.nodes.size())
    throw validation_error("solve_disc_fan: grids have different radial rules");
  if (n_rays < 4) n_rays = 4;

  DiscFan fan;
  fan.rho_half = *w_lo.radial.break_at;
  const RadialRule fan_rule = truncate_after_break(w_lo.radial);
  const std::size_t n_nodes = fan_rule.size();
  const std::size_t nm = w_lo.n_m();

  const double glo = w_lo.gamma, ghi = w_hi.gamma;
  const double mid = 0.5 * (glo + ghi), half = 0.5 * (ghi - glo);
  fan.thetas.resize(n_rays);
  for (int a = 0; a < n_rays; ++a)
    fan.thetas[a] = mid - half * std::cos(pi * a / (n_rays - 1));
  fan.thetas.front() = glo;
  fan.thetas.back() = ghi;

  auto truncate_grid = [&](const BorelGrid& src) {
    BorelGrid g = src;
    g.radial = fan_rule;
    g.values.assign(src.values.begin(), src.values.begin() + n_nodes * nm);
    return g;
  };

  fan.columns.resize(n_rays);
  fan.columns[0] = truncate_grid(w_lo);
  fan.columns[n_rays - 1] = truncate_grid(w_hi);
  for (int a = 1; a + 1 < n_rays; ++a) {
    BorelGrid tpl = zero_like(fan.columns[0]);
    tpl.gamma = fan.thetas[a];
    const HepsWorkspace ws = make_heps_workspace(spec, tpl, opts);
    fan.columns[a] = solve_fixed_point(ws).w;
  }

  // consistency: interior columns extrapolated to the endpoints must match
  // the full solutions on the shared disc segment
  std::vector<double> interior_thetas(fan.thetas.begin() + 1, fan.thetas.end() - 1);
  const auto bw = barycentric_weights(interior_thetas);
  double worst = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double th = side == 0 ? glo : ghi;
    const auto coeff = barycentric_coeffs(interior_thetas, bw, th);
    const auto actual = interp_radial_line(fan.columns[side == 0 ? 0 : n_rays - 1], fan.rho_half);
    std::vector<cplx> ext(nm, cplx(0.0, 0.0));
    for (int a = 1; a + 1 < n_rays; ++a) {
      const auto line = interp_radial_line(fan.columns[a], fan.rho_half);
      for (std::size_t j = 0; j < nm; ++j) ext[j] += coeff[a - 1] * line[j];
    }
    double scale = 0.0, dev = 0.0;
    for (std::size_t j = 0; j < nm; ++j) {
      scale = std::max(scale, std::abs(actual[j]));
      dev = std::max(dev, std::abs(ext[j] - actual[j]));
    }
    if (scale > 0.0) worst = std::max(worst, dev / scale);
  }
  fan.consistency = worst;
  return fan;
}

PathDecomposition difference_paths(const BorelGrid& w_p, const BorelGrid& w_p1,
                                   const DiscFan& fan, const ProblemSpec& spec,
                                   const CoveringData& cov, int p, cplx t, cplx z, cplx eps,
                                   const ReconstructOptions& opts) {
  if (!w_p.radial.break_at)
    throw validation_error("difference_paths: grids need a radial break at rho/2");
  if (fan.thetas.front() != w_p.gamma || fan.thetas.back() != w_p1.gamma)
    throw validation_error("difference_paths: fan endpoints do not match the grids");

  const cplx T = eps * t;
  const double k = w_p.k;
  PathDecomposition out;

  const MLine full_p = laplace_k_all(w_p, T, opts.laplace);
  const MLine full_p1 = laplace_k_all(w_p1, T, opts.laplace);
  LaplaceOptions tail_opts = opts.laplace;
  tail_opts.enforce_trunc = false;  // tails are exponentially small by design
  const MLine tail_p = laplace_k_all(w_p, T, tail_opts, w_p.radial.break_node);
  const MLine tail_p1 = laplace_k_all(w_p1, T, tail_opts, w_p1.radial.break_node);

  // arc integrand: i k w(rho/2 e^{i theta}, m) exp(-(rho/2 e^{i theta}/T)^k)
  const double r2k = std::pow(fan.rho_half, k);
  const double Tk = std::pow(std::abs(T), k);
  const double argT = std::arg(T);
  const double dg = fan.thetas.back() - fan.thetas.front();
  for (double th : {fan.thetas.front(), fan.thetas.back(), 0.5 * (fan.thetas.front() + fan.thetas.back())})
    if (std::cos(k * wrap_angle(th - argT)) <= 0.0)
      throw numeric_error("difference_paths: arc leaves the admissible cone");

  const double phase_span = r2k / Tk * k * std::abs(dg);
  const int n_theta = std::min(128, std::max(16, 16 + static_cast<int>(4.0 * phase_span)));
  const QuadRule arc_rule = gauss_legendre(n_theta, fan.thetas.front(), fan.thetas.back());

  const std::size_t nm = w_p.n_m();
  std::vector<std::vector<cplx>> lines(fan.columns.size());
  for (std::size_t a = 0; a < fan.columns.size(); ++a)
    lines[a] = interp_radial_line(fan.columns[a], fan.rho_half);
  const auto bw = barycentric_weights(fan.thetas);

  MLine arc;
  arc.m = w_p.m_nodes;
  arc.v.assign(nm, cplx(0.0, 0.0));
  for (int s = 0; s < n_theta; ++s) {
    const double th = arc_rule.x[s];
    const double phi = wrap_angle(th - argT);
    const cplx expo = -(r2k / Tk) * cplx(std::cos(k * phi), std::sin(k * phi));
    const cplx factor = cplx(0.0, 1.0) * k * arc_rule.w[s] * std::exp(expo);
    const auto coeff = barycentric_coeffs(fan.thetas, bw, th);
    for (std::size_t a = 0; a < lines.size(); ++a) {
      if (coeff[a] == 0.0) continue;
      const cplx ca = factor * coeff[a];
      const std::vector<cplx>& ln = lines[a];
      for (std::size_t j = 0; j < nm; ++j) arc.v[j] += ca * ln[j];
    }
  }

  const double beta = w_p.beta;
  out.direct = fourier_inverse(full_p1, z, beta).value - fourier_inverse(full_p, z, beta).value;
  out.i1 = fourier_inverse(tail_p1, z, beta).value;
  out.i2 = -fourier_inverse(tail_p, z, beta).value;
  out.i3 = fourier_inverse(arc, z, beta).value;
  (void)spec;
  (void)cov;
  (void)p;
  return out;
}

SweepResult flatness_sweep(const ProblemSpec& spec, const CoveringData& cov, int p,
                           const GridShape& shape, const SweepOptions& opts) {
  SweepResult res;
  res.overlap_index = p;
  const int p1 = (p + 1) % cov.varsigma;
  const double gp = cov.directions.at(p), gp1 = cov.directions.at(p1);
  const double k = spec.k;

  // overlap centre of E_p and E_{p+1}
  double eps_arg;
  if (opts.eps_arg) {
    eps_arg = *opts.eps_arg;
  } else {
    const auto& ep = cov.eps_sectors[p];
    const auto& eq = cov.eps_sectors[p1];
    const double rel = wrap_angle(eq.direction - ep.direction);
    const double lo = std::max(-0.5 * ep.aperture, rel - 0.5 * eq.aperture);
    const double hi = std::min(0.5 * ep.aperture, rel + 0.5 * eq.aperture);
    if (lo >= hi) throw validation_error("flatness_sweep: E_p and E_{p+1} do not overlap");
    eps_arg = wrap_angle(ep.direction + 0.5 * (lo + hi));
  }

  // admissibility margin over the sweep's directions and time arguments
  double delta1 = 1.0;
  for (double g : {gp, gp1})
    for (double ta : {-0.5 * cov.time_sector.aperture, 0.5 * cov.time_sector.aperture})
      delta1 = std::min(delta1, std::cos(k * wrap_angle(g - eps_arg - ta)));
  if (delta1 <= 0.05)
    throw numeric_error("flatness_sweep: sweep argument inadmissible for the Laplace rays");
  res.delta1 = delta1;
  const double delta2 = 0.5 * delta1;
  double sigma = opts.sigma_factor *
                 std::pow(delta1 / (delta2 + shape.nu * std::pow(spec.eps0, k)), 1.0 / k);
  sigma = std::min(sigma, 0.9 * cov.time_sector.radius);
  res.sigma_prime = sigma;

  for (int it = 1; it <= opts.n_t / 2; ++it)
    for (double ta : {-0.25 * cov.time_sector.aperture, 0.25 * cov.time_sector.aperture})
      res.t_grid.push_back(std::polar(sigma * it / (opts.n_t / 2), ta));
  const double beta_prime = 0.5 * spec.forcing.beta;
  for (int iz = 0; iz < opts.n_z / 2; ++iz)
    for (double im : {0.0, 0.5 * beta_prime})
      res.z_grid.push_back(cplx(-2.0 + 4.0 * iz / (opts.n_z / 2 - 1), im));

  GridShape run_shape = shape;
  run_shape.rho = cov.rho;
  run_shape.break_at = 0.5 * cov.rho;

  const double dg = std::abs(wrap_angle(gp1 - gp));
  const int fan_rays = std::min(24, std::max(opts.fan_rays_min, 8 + static_cast<int>(8.0 * dg)));

  for (int ie = 0; ie < opts.n_eps; ++ie) {
    SweepRow row;
    const double abs_eps =
        opts.eps_abs_lo * std::pow(opts.eps_abs_hi / opts.eps_abs_lo,
                                   opts.n_eps > 1 ? static_cast<double>(ie) / (opts.n_eps - 1) : 0.0);
    row.eps_abs = abs_eps;
    row.eps_arg = eps_arg;
    const cplx eps = std::polar(abs_eps, eps_arg);
    try {
      BorelGrid glo = make_borel_grid(run_shape, gp, eps);
      BorelGrid ghi = make_borel_grid(run_shape, gp1, eps);
      const HepsWorkspace ws_lo = make_heps_workspace(spec, glo, opts.solve);
      const HepsWorkspace ws_hi = make_heps_workspace(spec, ghi, opts.solve);
      const SolveResult lo = solve_fixed_point(ws_lo);
      const SolveResult hi = solve_fixed_point(ws_hi);
      row.iterations_lo = lo.trace.iterations;
      row.iterations_hi = hi.trace.iterations;

      DiscFan fan;
      if (opts.with_paths) fan = solve_disc_fan(spec, lo.w, hi.w, fan_rays, opts.solve);

      ReconstructOptions ro;
      ro.check_membership = false;  // membership is the planner's concern; the
                                    // Laplace admissibility check still applies
      double sup = 0.0, max_u = 0.0, defect = 0.0, defect_direct = 0.0, noise = 0.0;
      for (const cplx& t : res.t_grid) {
        const cplx T = eps * t;
        const MLine Lp = laplace_k_all(lo.w, T, ro.laplace);
        const MLine Lp1 = laplace_k_all(hi.w, T, ro.laplace);
        for (const cplx& z : res.z_grid) {
          const cplx up = fourier_inverse(Lp, z, spec.forcing.beta).value;
          const cplx up1 = fourier_inverse(Lp1, z, spec.forcing.beta).value;
          max_u = std::max(max_u, std::max(std::abs(up), std::abs(up1)));
          sup = std::max(sup, std::abs(up1 - up));
          if (opts.with_paths) {
            const PathDecomposition pd =
                difference_paths(lo.w, hi.w, fan, spec, cov, p, t, z, eps, ro);
            if (pd.defect() > defect) {
              defect = pd.defect();
              defect_direct = std::abs(pd.direct);
            }
          }
        }
      }
      row.supdiff = sup;
      row.max_u = max_u;
      row.path_defect = defect;
      row.path_direct = defect_direct;
      // quadrature noise: truncation of the Laplace integrals plus rounding
      row.noise_estimate = 1e-13 * max_u + 1e-16;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    res.rows.push_back(std::move(row));
  }
  return res;
}

GevreyFit gevrey_fit(const std::vector<SweepRow>& rows, double k, double kappa_lo,
                     double kappa_hi) {
  std::vector<double> eps_abs, logd;
  for (const auto& row : rows) {
    if (!row.ok) continue;
    if (row.supdiff <= 10.0 * row.noise_estimate) continue;  // below the noise floor
    eps_abs.push_back(row.eps_abs);
    logd.push_back(std::log(row.supdiff));
  }
  if (eps_abs.size() < 3)
    throw numeric_error("gevrey_fit: not enough sweep rows above the noise floor");

  GevreyFit fit;
  fit.rows_used = static_cast<int>(eps_abs.size());
  auto fit_at = [&](double kappa) {
    std::vector<double> x(eps_abs.size());
    for (std::size_t i = 0; i < eps_abs.size(); ++i) x[i] = std::pow(eps_abs[i], -kappa);
    return fit_line(x, logd);
  };
  const LineFit base = fit_at(k);
  fit.log_k = base.intercept;
  fit.m_rate = -base.slope;
  fit.r2 = base.r2;

  if (kappa_lo <= 0.0) kappa_lo = std::max(0.05, k - 0.3);
  if (kappa_hi <= kappa_lo) kappa_hi = k + 0.3;
  double best_kappa = kappa_lo, best_r2 = -1e300;
  const int n_scan = 61;
  for (int i = 0; i < n_scan; ++i) {
    const double kappa = kappa_lo + (kappa_hi - kappa_lo) * i / (n_scan - 1);
    const double r2 = fit_at(kappa).r2;
    fit.scan.emplace_back(kappa, r2);
    if (r2 > best_r2) {
      best_r2 = r2;
      best_kappa = kappa;
    }
  }
  // golden-section refinement of the scan maximum
  const double step = (kappa_hi - kappa_lo) / (n_scan - 1);
  double a = std::max(kappa_lo, best_kappa - step), b = std::min(kappa_hi, best_kappa + step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = fit_at(c).r2, fd = fit_at(d).r2;
  for (int i = 0; i < 60; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = fit_at(c).r2;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = fit_at(d).r2;
    }
  }
  fit.kappa_hat = 0.5 * (a + b);
  fit.kappa_r2 = fit_at(fit.kappa_hat).r2;
  return fit;
}

namespace {

// complex Householder QR least squares: A (rows x cols, row-major) x = b
// for several right-hand sides; returns the R-diagonal condition estimate.
double qr_least_squares(std::vector<cplx>& A, std::size_t rows, std::size_t cols,
                        std::vector<std::vector<cplx>>& rhs) {
  std::vector<cplx> vhead(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double norm = 0.0;
    for (std::size_t r = c; r < rows; ++r) norm += std::norm(A[r * cols + c]);
    norm = std::sqrt(norm);
    if (norm == 0.0) throw numeric_error("asymptotic_coefficients: rank-deficient system");
    const cplx akk = A[c * cols + c];
    const cplx phase = (std::abs(akk) > 0.0) ? akk / std::abs(akk) : cplx(1.0, 0.0);
    const cplx alpha = -phase * norm;
    // v = a_c - alpha e_c (stored in place of the column below the diagonal)
    A[c * cols + c] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t r = c; r < rows; ++r) vnorm2 += std::norm(A[r * cols + c]);
    if (vnorm2 == 0.0) throw numeric_error("asymptotic_coefficients: degenerate column");
    // apply H = I - 2 v v^* / |v|^2 to the remaining columns and all rhs
    for (std::size_t c2 = c + 1; c2 < cols; ++c2) {
      cplx dot(0.0, 0.0);
      for (std::size_t r = c; r < rows; ++r)
        dot += std::conj(A[r * cols + c]) * A[r * cols + c2];
      dot *= 2.0 / vnorm2;
      for (std::size_t r = c; r < rows; ++r) A[r * cols + c2] -= dot * A[r * cols + c];
    }
    for (auto& b : rhs) {
      cplx dot(0.0, 0.0);
      for (std::size_t r = c; r < rows; ++r) dot += std::conj(A[r * cols + c]) * b[r];
      dot *= 2.0 / vnorm2;
      for (std::size_t r = c; r < rows; ++r) b[r] -= dot * A[r * cols + c];
    }
    vhead[c] = alpha;  // R diagonal
  }
  // back substitution: R x = Q^* b (upper triangle of A with vhead diagonal)
  for (auto& b : rhs) {
    std::vector<cplx> x(cols);
    for (std::size_t c = cols; c-- > 0;) {
      cplx s = b[c];
      for (std::size_t c2 = c + 1; c2 < cols; ++c2) s -= A[c * cols + c2] * x[c2];
      x[c] = s / vhead[c];
    }
    b.assign(x.begin(), x.end());
  }
  double dmax = 0.0, dmin = 1e300;
  for (std::size_t c = 0; c < cols; ++c) {
    dmax = std::max(dmax, std::abs(vhead[c]));
    dmin = std::min(dmin, std::abs(vhead[c]));
  }
  return dmax / std::max(dmin, 1e-300);
}

}  // namespace

AsymptoticSeries asymptotic_coefficients(const std::vector<cplx>& eps_samples,
                                         const std::vector<std::vector<cplx>>& u_samples,
                                         int order, double k) {
  const std::size_t S = eps_samples.size();
  if (order < 1) throw validation_error("asymptotic_coefficients: order >= 1 required");
  if (S < static_cast<std::size_t>(2 * order))
    throw validation_error("asymptotic_coefficients: need at least 2*order eps samples");
  if (u_samples.size() != S)
    throw validation_error("asymptotic_coefficients: sample count mismatch");
  const std::size_t n_pts = u_samples.front().size();

  double scale = 0.0;
  for (const auto& e : eps_samples) scale = std::max(scale, std::abs(e));
  std::vector<cplx> A(S * order);
  for (std::size_t s = 0; s < S; ++s) {
    cplx pw(1.0, 0.0);
    const cplx es = eps_samples[s] / scale;
    for (int m = 0; m < order; ++m) {
      A[s * order + m] = pw;
      pw *= es;
    }
  }
  std::vector<std::vector<cplx>> rhs(n_pts, std::vector<cplx>(S));
  for (std::size_t pt = 0; pt < n_pts; ++pt)
    for (std::size_t s = 0; s < S; ++s) rhs[pt][s] = u_samples[s][pt];

  AsymptoticSeries out;
  out.cond_estimate = qr_least_squares(A, S, order, rhs);
  if (out.cond_estimate > 1e10)
    throw numeric_error("asymptotic_coefficients: Vandermonde too ill-conditioned (order "
                        "too large for the sample spread)");

  out.coeffs.assign(order, std::vector<cplx>(n_pts));
  out.sup_abs.assign(order, 0.0);
  for (int m = 0; m < order; ++m) {
    const double unscale = std::pow(scale, -m);
    for (std::size_t pt = 0; pt < n_pts; ++pt) {
      const cplx h = rhs[pt][m] * unscale;
      out.coeffs[m][pt] = h;
      out.sup_abs[m] = std::max(out.sup_abs[m], std::abs(h));
    }
  }

  // growth report: ln|h_m| <= ln C + m ln M + ln Gamma(1 + m/k)
  std::vector<double> xs, ys;
  for (int m = 0; m < order; ++m) {
    if (out.sup_abs[m] <= 0.0) continue;
    xs.push_back(m);
    ys.push_back(std::log(out.sup_abs[m]) - std::lgamma(1.0 + m / k));
  }
  if (xs.size() >= 2) {
    const LineFit f = fit_line(xs, ys);
    out.growth_c = std::exp(f.intercept);
    out.growth_m = std::exp(f.slope);
    double resid = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      resid = std::max(resid, std::abs(ys[i] - (f.intercept + f.slope * xs[i])));
    out.growth_resid = resid;
  }
  return out;
}

}  // namespace borelsum
