#include "borelsum/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace borelsum {

cplx ForcingMode::eval(double m, cplx eps) const {
  return profile(m) * eps_poly.eval(eps);
}

double ForcingMode::profile(double m) const {
  const double am = std::abs(m);
  const double envelope = amplitude * std::pow(1.0 + am, -mu_prime) * std::exp(-beta_prime * am);
  const double modal_factor = (modal == ModalKind::cosine) ? std::cos(omega * m) : std::sin(omega * m);
  return envelope * modal_factor;
}

cplx ForcingSpec::eval(int n, double m, cplx eps) const {
  cplx sum(0.0, 0.0);
  for (const auto& mode : modes)
    if (mode.n == n) sum += mode.eval(m, eps);
  return sum;
}

int ForcingSpec::max_n() const {
  int n = 0;
  for (const auto& mode : modes) n = std::max(n, mode.n);
  return n;
}

bool ValidationReport::passed() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ValidationEntry& e) { return e.passed; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& e : entries)
    os << (e.passed ? "[pass] " : "[FAIL] ") << e.name
       << (e.detail.empty() ? "" : ": " + e.detail) << "\n";
  return os.str();
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void add_entry(ValidationReport& rep, const std::string& name, bool ok,
               const std::string& detail = "") {
  rep.entries.push_back({name, ok, detail});
}

}  // namespace

ValidationReport validate_spec(const ProblemSpec& spec, const std::vector<double>& m_grid) {
  if (m_grid.empty()) throw validation_error("validate_spec: empty m-grid");
  if (std::abs(m_grid.front() + m_grid.back()) > 1e-9 * (1.0 + std::abs(m_grid.back())))
    throw validation_error("validate_spec: m-grid must be symmetric about 0");
  if (!(spec.k > 0.5 && spec.k < 1.0))
    throw validation_error("hypothesis violated: k in (1/2,1), got k = " + fmt(spec.k));

  ValidationReport rep;
  add_entry(rep, "D >= 2", spec.D >= 2, "D = " + std::to_string(spec.D));
  add_entry(rep, "alpha_D > 0", spec.alpha_D > 0.0);
  add_entry(rep, "eps0 > 0", spec.eps0 > 0.0);
  add_entry(rep, "levels cover l = 1..D-1",
            static_cast<int>(spec.levels.size()) == spec.D - 1,
            std::to_string(spec.levels.size()) + " levels");

  bool deltas_ok = !spec.levels.empty() && spec.levels.front().delta == 1;
  for (std::size_t i = 0; i + 1 < spec.levels.size(); ++i)
    deltas_ok = deltas_ok && spec.levels[i].delta < spec.levels[i + 1].delta;
  add_entry(rep, "delta_1 = 1 and delta_l strictly increasing", deltas_ok);

  for (const auto& lv : spec.levels) {
    const std::string tag = " [l=" + std::to_string(lv.index) + "]";
    const double dlk = lv.d - lv.delta * (spec.k + 1.0);
    add_entry(rep, "d_l > delta_l(k+1)" + tag, dlk > 0.0, "d_lk = " + fmt(dlk));
    add_entry(rep, "Delta_l - d_l + delta_l >= 0" + tag, lv.Delta - lv.d + lv.delta >= 0);
    add_entry(rep, "kappa_l > 0" + tag, lv.kappa > 0.0);
    add_entry(rep, "|I_l| within cap" + tag,
              static_cast<int>(lv.A.size()) <= spec.max_index_set,
              std::to_string(lv.A.size()) + " entries");
    bool n_nonneg = true;
    for (const auto& [n, poly] : lv.A) n_nonneg = n_nonneg && n >= 0;
    add_entry(rep, "I_l subset of N" + tag, n_nonneg);
  }

  bool degrees = spec.Q.degree() == spec.RD.degree() &&
                 spec.RD.degree() >= spec.Q1.degree() &&
                 spec.RD.degree() >= spec.Q2.degree();
  for (const auto& lv : spec.levels) degrees = degrees && spec.RD.degree() >= lv.R.degree();
  add_entry(rep, "deg(Q) = deg(RD) >= deg(R_l), deg(Q1), deg(Q2)", degrees);

  // scale-aware nonvanishing thresholds
  auto poly_scale = [](const ComplexPolynomial& p, double m) {
    double s = 0.0, mp = 1.0;
    const double am = std::max(1.0, std::abs(m));
    for (const auto& c : p.coeffs) {
      s += std::abs(c) * mp;
      mp *= am;
    }
    return s;
  };
  bool q_nonzero = true, rd_nonzero = true;
  double q_worst = 1e300, rd_worst = 1e300;
  std::string q_where, rd_where;
  for (double m : m_grid) {
    const double q = std::abs(spec.Q.eval_im(m));
    const double rd = std::abs(spec.RD.eval_im(m));
    if (q <= 1e-10 * poly_scale(spec.Q, m)) {
      q_nonzero = false;
      if (q < q_worst) q_where = "m = " + fmt(m);
    }
    if (rd <= 1e-10 * poly_scale(spec.RD, m)) {
      rd_nonzero = false;
      if (rd < rd_worst) rd_where = "m = " + fmt(m);
    }
    q_worst = std::min(q_worst, q);
    rd_worst = std::min(rd_worst, rd);
  }
  add_entry(rep, "Q(im) != 0", q_nonzero, q_nonzero ? "" : "vanishes near " + q_where);
  add_entry(rep, "RD(im) != 0", rd_nonzero, rd_nonzero ? "" : "vanishes near " + rd_where);

  if (q_nonzero && rd_nonzero) {
    double r1 = 1e300, r2 = 0.0, amin = 1e300, amax = -1e300;
    auto absorb = [&](cplx ratio) {
      r1 = std::min(r1, std::abs(ratio));
      r2 = std::max(r2, std::abs(ratio));
      const double a = std::arg(ratio);
      amin = std::min(amin, a);
      amax = std::max(amax, a);
    };
    for (double m : m_grid) absorb(spec.Q.eval_im(m) / spec.RD.eval_im(m));
    absorb(spec.Q.leading() / spec.RD.leading());  // |m| -> inf limit (equal degrees)
    rep.r1 = r1;
    rep.r2 = r2;
    rep.direction = 0.5 * (amin + amax);
    rep.aperture = 0.5 * (amax - amin);
    add_entry(rep, "Q(im)/RD(im) in annulus with r1 > 1", r1 > 1.0,
              "r1 = " + fmt(r1) + ", r2 = " + fmt(r2) + ", d = " + fmt(rep.direction) +
                  ", eta = " + fmt(rep.aperture));
  } else {
    add_entry(rep, "Q(im)/RD(im) in annulus with r1 > 1", false, "ratio undefined");
  }

  const double mu_floor = std::max(spec.Q1.degree(), spec.Q2.degree()) + 1.0;
  add_entry(rep, "mu > max(deg Q1, deg Q2) + 1", spec.forcing.mu > mu_floor,
            "mu = " + fmt(spec.forcing.mu) + ", floor = " + fmt(mu_floor));

  bool modes_ok = true;
  std::string mode_detail;
  for (const auto& mode : spec.forcing.modes) {
    if (mode.n < 1) {
      modes_ok = false;
      mode_detail = "mode with n < 1";
    }
    if (mode.mu_prime < spec.forcing.mu || mode.beta_prime < spec.forcing.beta) {
      modes_ok = false;
      mode_detail = "mode decay weaker than (beta, mu)";
    }
  }
  add_entry(rep, "forcing profiles dominate the (beta, mu) envelope", modes_ok, mode_detail);

  // ||F_n||_(beta,mu) <= K0 (1/T0)^n, evaluated on the grid with |eps| = eps0
  bool norm_ok = spec.forcing.K0 > 0.0 && spec.forcing.T0 > 0.0;
  std::string norm_detail;
  const int n_hi = spec.forcing.max_n();
  for (int n = 1; n <= n_hi && norm_ok; ++n) {
    double nrm = 0.0;
    for (double m : m_grid) {
      double amp = 0.0;
      for (const auto& mode : spec.forcing.modes) {
        if (mode.n != n) continue;
        double sup_poly = 0.0;
        for (int a = 0; a < 32; ++a) {
          const cplx e = spec.eps0 * std::exp(cplx(0.0, 2.0 * pi * a / 32.0));
          sup_poly = std::max(sup_poly, std::abs(mode.eps_poly.eval(e)));
        }
        amp += std::abs(mode.profile(m)) * sup_poly;
      }
      nrm = std::max(nrm, std::pow(1.0 + std::abs(m), spec.forcing.mu) *
                              std::exp(spec.forcing.beta * std::abs(m)) * amp);
    }
    const double bound = spec.forcing.K0 * std::pow(1.0 / spec.forcing.T0, n);
    if (nrm > bound * (1.0 + 1e-12)) {
      norm_ok = false;
      norm_detail = "n = " + std::to_string(n) + ": ||F_n|| = " + fmt(nrm) +
                    " > K0/T0^n = " + fmt(bound);
    }
  }
  add_entry(rep, "||F_n|| <= K0 (1/T0)^n", norm_ok, norm_detail);

  return rep;
}

double d_lk(const ProblemSpec& spec, int l) {
  if (l < 1 || l > static_cast<int>(spec.levels.size()))
    throw validation_error("d_lk: level index out of range");
  const Level& lv = spec.levels[l - 1];
  const double v = lv.d - lv.delta * (spec.k + 1.0);
  if (v <= 0.0)
    throw validation_error("d_lk: d_l - delta_l(k+1) = " + std::to_string(v) + " <= 0");
  return v;
}

std::vector<double> tahara_coefficients(int delta, double k) {
  if (delta < 1) throw validation_error("tahara_coefficients: delta >= 1 required");
  // C[p] holds the coefficient of T^{k(delta-p)} (T^{k+1} d_T)^p at the
  // current order; C[delta] = 1 by construction.
  std::vector<double> C(delta + 1, 0.0);
  C[1] = 1.0;
  for (int d = 1; d < delta; ++d) {
    std::vector<double> next(delta + 1, 0.0);
    for (int p = 1; p <= d + 1; ++p) {
      double v = (p >= 2) ? C[p - 1] : 0.0;
      if (p <= d) v -= (k * p + d) * C[p];
      next[p] = v;
    }
    C.swap(next);
  }
  return std::vector<double>(C.begin() + 1, C.begin() + delta);
}

ForcingPsiResult forcing_psi(const ProblemSpec& spec, const BorelGrid& grid_template,
                             double tail_tol, int max_terms) {
  ForcingPsiResult res;
  res.grid = zero_like(grid_template);
  BorelGrid& g = res.grid;
  const double k = spec.k;
  const std::size_t nr = g.n_r(), nm = g.n_m();

  std::vector<cplx> tau_pow(nr, cplx(1.0, 0.0));
  std::vector<cplx> tau(nr);
  for (std::size_t i = 0; i < nr; ++i)
    tau[i] = std::polar(g.radial.nodes[i], g.gamma);

  const int explicit_max = spec.forcing.max_n();
  double accum_max = 0.0;
  double prev_term = 0.0, term_max = 0.0;
  int n = 0;
  for (n = 1; n <= max_terms; ++n) {
    for (std::size_t i = 0; i < nr; ++i) tau_pow[i] *= tau[i];
    const double inv_gamma = std::exp(-std::lgamma(static_cast<double>(n) / k));
    prev_term = term_max;
    term_max = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < nm; ++j) {
      const cplx Fn = spec.forcing.eval(n, g.m_nodes[j], g.eps);
      if (Fn == cplx(0.0, 0.0)) continue;
      any = true;
      for (std::size_t i = 0; i < nr; ++i) {
        const cplx t = Fn * tau_pow[i] * inv_gamma;
        g.at(i, j) += t;
        term_max = std::max(term_max, std::abs(t));
      }
    }
    accum_max = std::max(accum_max, term_max);
    if (n > explicit_max) {
      if (!any) {
        term_max = 0.0;
        break;  // finite mode list exhausted
      }
      if (term_max < tail_tol * std::max(accum_max, 1e-300) && prev_term > 0.0 &&
          term_max < prev_term)
        break;
    }
  }
  res.terms_used = std::min(n, max_terms);
  if (term_max > 0.0 && prev_term > term_max) {
    const double ratio = term_max / prev_term;
    res.tail_estimate = term_max * ratio / (1.0 - ratio);
  } else {
    res.tail_estimate = term_max;
  }
  if (res.tail_estimate > tail_tol * std::max(accum_max, 1e-300))
    res.warnings.push_back("forcing_psi: tail estimate " + std::to_string(res.tail_estimate) +
                           " exceeds tolerance at r_max");
  return res;
}

}  // namespace borelsum
