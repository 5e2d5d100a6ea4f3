#include "borelsum/solver.hpp"

#include <chrono>
#include <cmath>

namespace borelsum {

namespace {

cplx int_pow(cplx z, int n) {
  cplx acc(1.0, 0.0);
  for (int i = 0; i < n; ++i) acc *= z;
  return acc;
}

// out += coeff * rl(im_j) * h_inv(i,j) * g(i,j)
void add_level_term(BorelGrid& out, cplx coeff, const std::vector<cplx>& rl,
                    const std::vector<cplx>& h_inv, const BorelGrid& g) {
  const std::size_t nm = out.n_m();
  for (std::size_t i = 0; i < out.n_r(); ++i) {
    const cplx* src = &g.values[i * nm];
    const cplx* hinv = &h_inv[i * nm];
    cplx* dst = &out.values[i * nm];
    for (std::size_t j = 0; j < nm; ++j) dst[j] += coeff * rl[j] * hinv[j] * src[j];
  }
}

// out += coeff * rl(im_j) * g(i,j)   (raw-equation assembly, no 1/H)
void add_level_term_raw(BorelGrid& out, cplx coeff, const std::vector<cplx>& rl,
                        const BorelGrid& g) {
  const std::size_t nm = out.n_m();
  for (std::size_t i = 0; i < out.n_r(); ++i) {
    const cplx* src = &g.values[i * nm];
    cplx* dst = &out.values[i * nm];
    for (std::size_t j = 0; j < nm; ++j) dst[j] += coeff * rl[j] * src[j];
  }
}

}  // namespace

HepsWorkspace make_heps_workspace(const ProblemSpec& spec, const BorelGrid& grid_template,
                                  const SolveOptions& opts) {
  HepsWorkspace ws;
  ws.spec = &spec;
  ws.grid_template = zero_like(grid_template);
  ws.opts = opts;
  const double k = spec.k;
  const BorelGrid& g = ws.grid_template;
  const std::size_t nr = g.n_r(), nm = g.n_m();

  ws.q_im.resize(nm);
  ws.rd_im.resize(nm);
  for (std::size_t j = 0; j < nm; ++j) {
    ws.q_im[j] = spec.Q.eval_im(g.m_nodes[j]);
    ws.rd_im[j] = spec.RD.eval_im(g.m_nodes[j]);
  }
  ws.exp_alpha.resize(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    const cplx tau_k = ray_pow(g.radial.nodes[i], g.gamma, k);
    ws.exp_alpha[i] = std::exp(spec.alpha_D * k * tau_k);
  }
  ws.h_val.resize(nr * nm);
  ws.h_inv.resize(nr * nm);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nm; ++j) {
      const cplx h = ws.q_im[j] - ws.exp_alpha[i] * ws.rd_im[j];
      if (std::abs(h) < opts.h_floor * std::abs(ws.q_im[j]))
        throw numeric_error("H(tau,m) below floor at node (" + std::to_string(i) + "," +
                            std::to_string(j) + "); direction inadmissible");
      ws.h_val[i * nm + j] = h;
      ws.h_inv[i * nm + j] = 1.0 / h;
    }

  ForcingPsiResult psi = forcing_psi(spec, g);
  ws.psi = std::move(psi.grid);
  ws.psi_tail = psi.tail_estimate;

  ws.ck = make_ck_operator(g.radial, g.gamma, k);

  for (const auto& lv : spec.levels) {
    HepsWorkspace::LevelOps ops;
    ops.kappa = lv.kappa;
    ws.rl_im.emplace_back(nm);
    auto& rl = ws.rl_im.back();
    for (std::size_t j = 0; j < nm; ++j) rl[j] = lv.R.eval_im(g.m_nodes[j]);

    const double dlk = d_lk(spec, lv.index);
    const cplx level_scalar = int_pow(g.eps, lv.Delta - lv.d + lv.delta) * lv.c;
    const std::vector<double> tahara = tahara_coefficients(lv.delta, k);
    for (const auto& [n, a_poly] : lv.A) {
      HepsWorkspace::LevelKernel kern;
      kern.n = n;
      const cplx an = a_poly.eval(g.eps);
      const double g2 = (n + dlk) / k - 1.0;
      kern.coeff = level_scalar * an * std::pow(k, lv.delta) *
                   std::exp(-std::lgamma((n + dlk) / k));
      kern.op = make_conv_operator(g.radial, g.gamma, {g2, lv.delta - 1.0, k});
      for (int p = 1; p <= lv.delta - 1; ++p) {
        HepsWorkspace::LevelKernel::Correction corr;
        corr.coeff = level_scalar * an * tahara[p - 1] * std::pow(k, p) *
                     std::exp(-std::lgamma((n + dlk) / k + lv.delta - p));
        corr.op = make_conv_operator(g.radial, g.gamma,
                                     {(n + dlk) / k + lv.delta - p - 1.0, p - 1.0, k});
        kern.corrections.push_back(std::move(corr));
      }
      ops.kernels.push_back(std::move(kern));
    }
    ws.levels.push_back(std::move(ops));
  }
  return ws;
}

BorelGrid apply_h_eps(const HepsWorkspace& ws, const BorelGrid& w) {
  const ProblemSpec& spec = *ws.spec;
  const std::size_t nm = w.n_m();
  BorelGrid out = zero_like(w);

  // forcing: cf psi / H
  for (std::size_t t = 0; t < out.values.size(); ++t)
    out.values[t] = spec.cf * ws.psi.values[t] * ws.h_inv[t];

  const bool w_zero = w.max_abs() == 0.0;
  BorelGrid tmp = zero_like(w);
  for (std::size_t li = 0; li < ws.levels.size(); ++li) {
    const auto& ops = ws.levels[li];
    if (ops.kernels.empty()) continue;
    if (w_zero) break;
    const ExpCkResult moeb =
        exp_neg_kappa_ck(ws.ck, w, ops.kappa, ws.opts.exp_tol, ws.opts.exp_pmax, ws.opts.workers);
    for (const auto& kern : ops.kernels) {
      kern.op.apply(moeb.grid, tmp, ws.opts.workers);
      add_level_term(out, kern.coeff, ws.rl_im[li], ws.h_inv, tmp);
      for (const auto& corr : kern.corrections) {
        corr.op.apply(moeb.grid, tmp, ws.opts.workers);
        add_level_term(out, corr.coeff, ws.rl_im[li], ws.h_inv, tmp);
      }
    }
  }

  if (spec.c12 != cplx(0.0, 0.0) && !w_zero) {
    const BorelGrid nl = nonlinear_product(w, w, spec.Q1, spec.Q2, ws.opts.workers);
    for (std::size_t t = 0; t < out.values.size(); ++t)
      out.values[t] += spec.c12 * nl.values[t] * ws.h_inv[t];
  }
  return out;
}

SolveResult solve_fixed_point(const HepsWorkspace& ws) {
  SolveResult res;
  res.w = zero_like(ws.grid_template);
  IterationTrace& tr = res.trace;
  double prev_diff = -1.0;
  int diverging = 0;
  const double tol = ws.opts.tol;

  for (int it = 1; it <= ws.opts.max_iter; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    BorelGrid next = apply_h_eps(ws, res.w);
    BorelGrid diff = next;
    add_scaled(diff, cplx(-1.0, 0.0), res.w);
    const double dn = norm_f(diff);
    const double wn = norm_f(next);
    const auto t1 = std::chrono::steady_clock::now();
    tr.wall_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    tr.iterate_norms.push_back(wn);
    tr.diff_norms.push_back(dn);
    tr.iterations = it;
    res.w = std::move(next);

    // ratios are meaningful only while the differences sit above the noise
    if (prev_diff > 10.0 * tol * std::max(1.0, wn)) {
      const double ratio = dn / prev_diff;
      tr.ratios.push_back(ratio);
      diverging = (ratio > 1.0) ? diverging + 1 : 0;
      if (diverging >= 3)
        throw convergence_error("solve_fixed_point: contraction ratios above 1 for 3 iterations");
    }
    prev_diff = dn;
    if (dn <= tol * std::max(1.0, wn)) {
      tr.converged = true;
      tr.final_diff = dn;
      tr.final_norm = wn;
      return res;
    }
  }
  throw convergence_error("solve_fixed_point: max_iter reached, last diff = " +
                          std::to_string(prev_diff));
}

double residual(const HepsWorkspace& ws, const BorelGrid& w) {
  const ProblemSpec& spec = *ws.spec;
  const std::size_t nm = w.n_m();
  BorelGrid lhs = zero_like(w);  // Q w - e^{alpha k tau^k} RD w - RHS(w)
  for (std::size_t i = 0; i < w.n_r(); ++i)
    for (std::size_t j = 0; j < nm; ++j)
      lhs.at(i, j) = (ws.q_im[j] - ws.exp_alpha[i] * ws.rd_im[j]) * w.at(i, j);

  BorelGrid qw = zero_like(w);
  for (std::size_t i = 0; i < w.n_r(); ++i)
    for (std::size_t j = 0; j < nm; ++j) qw.at(i, j) = ws.q_im[j] * w.at(i, j);
  const double scale = norm_f(qw);
  if (scale == 0.0) {
    // w = 0: the residual is the norm of the forcing term relative to nothing;
    // report the absolute forcing norm so the zero-forcing case comes out 0
    BorelGrid f = ws.psi;
    for (auto& v : f.values) v *= spec.cf;
    return norm_f(f);
  }

  const bool w_zero = w.max_abs() == 0.0;
  BorelGrid tmp = zero_like(w);
  for (std::size_t li = 0; li < ws.levels.size() && !w_zero; ++li) {
    const auto& ops = ws.levels[li];
    if (ops.kernels.empty()) continue;
    const ExpCkResult moeb =
        exp_neg_kappa_ck(ws.ck, w, ops.kappa, ws.opts.exp_tol, ws.opts.exp_pmax, ws.opts.workers);
    for (const auto& kern : ops.kernels) {
      kern.op.apply(moeb.grid, tmp, ws.opts.workers);
      add_level_term_raw(lhs, -kern.coeff, ws.rl_im[li], tmp);
      for (const auto& corr : kern.corrections) {
        corr.op.apply(moeb.grid, tmp, ws.opts.workers);
        add_level_term_raw(lhs, -corr.coeff, ws.rl_im[li], tmp);
      }
    }
  }
  if (spec.c12 != cplx(0.0, 0.0) && !w_zero) {
    const BorelGrid nl = nonlinear_product(w, w, spec.Q1, spec.Q2, ws.opts.workers);
    add_scaled(lhs, -spec.c12, nl);
  }
  add_scaled(lhs, -spec.cf, ws.psi);
  return norm_f(lhs) / scale;
}

SmallnessLedger smallness_ledger(const ProblemSpec& spec, const HBoundEstimates& hbounds,
                                 const BorelGrid& grid_template,
                                 const std::vector<double>& varpi_candidates, int workers) {
  SmallnessLedger led;
  led.eta2 = hbounds.eta2;
  led.k1 = hbounds.k1;
  const double k = spec.k;
  const double eta = std::min(hbounds.eta2, 0.5);

  SolveOptions opts;
  opts.workers = workers;
  HepsWorkspace ws = make_heps_workspace(spec, grid_template, opts);

  // unit-norm probe functions
  std::vector<BorelGrid> probes = make_k1_samples(grid_template);
  if (ws.psi.max_abs() > 0.0) probes.push_back(ws.psi);
  for (auto& p : probes) {
    const double n = norm_f(p);
    for (auto& v : p.values) v /= n;
  }

  // per-(l,n) composite operator norms, probed
  const std::size_t nm = grid_template.n_m();
  double lin = 0.0;
  for (std::size_t li = 0; li < spec.levels.size(); ++li) {
    const Level& lv = spec.levels[li];
    const double dlk = d_lk(spec, lv.index);
    const double eps_pow = std::pow(spec.eps0, lv.Delta - lv.d + lv.delta);
    const std::vector<double> tahara = tahara_coefficients(lv.delta, k);
    for (const auto& [n, a_poly] : lv.A) {
      double sup_a = 0.0;
      for (int a = 0; a < 32; ++a)
        sup_a = std::max(sup_a, std::abs(a_poly.eval(
                                    spec.eps0 * std::exp(cplx(0.0, 2.0 * pi * a / 32.0)))));

      const ConvOperator lead =
          make_conv_operator(grid_template.radial, grid_template.gamma,
                             {(n + dlk) / k - 1.0, lv.delta - 1.0, k});
      double c5 = 0.0;
      std::vector<double> c7(std::max(0, lv.delta - 1), 0.0);
      for (const auto& probe : probes) {
        const ExpCkResult moeb = exp_neg_kappa_ck(ws.ck, probe, lv.kappa, opts.exp_tol,
                                                  opts.exp_pmax, workers);
        BorelGrid tmp = lead.apply(moeb.grid, workers);
        for (std::size_t i = 0; i < tmp.n_r(); ++i)
          for (std::size_t j = 0; j < nm; ++j)
            tmp.at(i, j) *= ws.rl_im[li][j] * ws.h_inv[i * nm + j];
        c5 = std::max(c5, norm_f(tmp));
        for (int p = 1; p <= lv.delta - 1; ++p) {
          const ConvOperator cop =
              make_conv_operator(grid_template.radial, grid_template.gamma,
                                 {(n + dlk) / k + lv.delta - p - 1.0, p - 1.0, k});
          BorelGrid t2 = cop.apply(moeb.grid, workers);
          for (std::size_t i = 0; i < t2.n_r(); ++i)
            for (std::size_t j = 0; j < nm; ++j)
              t2.at(i, j) *= ws.rl_im[li][j] * ws.h_inv[i * nm + j];
          c7[p - 1] = std::max(c7[p - 1], norm_f(t2));
        }
      }
      c5 *= 1.1;
      led.c5_max = std::max(led.c5_max, c5);
      double term = c5 * std::pow(k, lv.delta) * std::exp(-std::lgamma((n + dlk) / k));
      for (int p = 1; p <= lv.delta - 1; ++p) {
        const double c7p = 1.1 * c7[p - 1];
        led.c7_max = std::max(led.c7_max, c7p);
        term += std::abs(tahara[p - 1]) * c7p * std::pow(k, p) *
                std::exp(-std::lgamma((n + dlk) / k + lv.delta - p));
      }
      lin += eps_pow * std::abs(lv.c) * sup_a * term;
    }
  }
  led.lin_coeff = lin;

  // nonlinear constant C3 via probe pairs; our product includes (2pi)^{-1/2}
  double c3 = 0.0;
  for (std::size_t a = 0; a < probes.size(); ++a)
    for (std::size_t b = a; b < probes.size(); ++b) {
      BorelGrid nl = nonlinear_product(probes[a], probes[b], spec.Q1, spec.Q2, workers);
      for (std::size_t i = 0; i < nl.n_r(); ++i)
        for (std::size_t j = 0; j < nm; ++j) nl.at(i, j) /= ws.q_im[j];
      c3 = std::max(c3, norm_f(nl) * std::sqrt(2.0 * pi));
    }
  led.c3 = 1.1 * c3;
  led.quad_coeff = std::abs(spec.c12) * led.c3 / (std::sqrt(2.0 * pi) * eta);

  // forcing constant: Kf = sup over eps on the boundary circle of ||psi||
  double kf = norm_f(ws.psi);
  for (int a = 0; a < 8; ++a) {
    BorelGrid g = zero_like(grid_template);
    g.eps = spec.eps0 * std::exp(cplx(0.0, 2.0 * pi * a / 8.0));
    kf = std::max(kf, norm_f(forcing_psi(spec, g).grid));
  }
  led.kf = kf;
  double min_q = 1e300;
  for (std::size_t j = 0; j < nm; ++j) min_q = std::min(min_q, std::abs(ws.q_im[j]));
  led.force_term = std::abs(spec.cf) * led.kf / (eta * min_q);

  std::vector<double> candidates = varpi_candidates;
  if (candidates.empty()) {
    for (int i = 0; i <= 72; ++i) candidates.push_back(std::pow(10.0, -6.0 + 7.0 * i / 72.0));
  }
  for (double x : candidates) {
    if (led.incl_lhs(x) <= x && led.shrink_lhs(x) <= 0.5) {
      led.varpi = x;
      led.pass = true;
      break;
    }
  }
  return led;
}

}  // namespace borelsum
