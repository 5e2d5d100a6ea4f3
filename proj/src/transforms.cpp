#include "borelsum/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace borelsum {

namespace {

struct LaplaceKernel {
  std::vector<cplx> factor;  // k * W_i * exp(-(r_i/|T|)^k e^{ik phi}) / r_i
  double cos_margin = 0.0;
  double decay_rate = 0.0;  // cos_margin / |T|^k
};

LaplaceKernel laplace_kernel(const BorelGrid& w, cplx T, const LaplaceOptions& opts,
                             std::size_t from_node) {
  if (T == cplx(0.0, 0.0)) throw numeric_error("laplace_k: T = 0");
  const double k = w.k;
  const double phi = wrap_angle(w.gamma - std::arg(T));
  LaplaceKernel ker;
  ker.cos_margin = std::cos(k * phi);
  if (ker.cos_margin < opts.delta1_min)
    throw numeric_error("laplace_k: direction inadmissible, cos(k(gamma - arg T)) = " +
                        std::to_string(ker.cos_margin));
  const double Tk = std::pow(std::abs(T), k);
  ker.decay_rate = ker.cos_margin / Tk;
  const auto& rule = w.radial;
  ker.factor.assign(rule.size(), cplx(0.0, 0.0));
  for (std::size_t i = from_node; i < rule.size(); ++i) {
    const double rk = std::pow(rule.nodes[i], k);
    const cplx exponent = -(rk / Tk) * cplx(std::cos(k * phi), std::sin(k * phi));
    ker.factor[i] = k * rule.weights[i] * std::exp(exponent) / rule.nodes[i];
  }
  return ker;
}

double laplace_tail(const BorelGrid& w, const LaplaceKernel& ker, double col_max) {
  // |w| <= col_max * e^{nu r^k} beyond r_max gives
  // tail <= col_max int_{R^k}^inf e^{-(decay - nu) x} dx / x.
  const double rate = ker.decay_rate - w.nu;
  if (rate <= 0.0) return 1e300;
  const double Rk = std::pow(w.radial.r_max, w.k);
  return col_max * std::exp(-rate * Rk) / (rate * Rk);
}

}  // namespace

LaplaceResult laplace_k(const BorelGrid& w, std::size_t j, cplx T,
                        const LaplaceOptions& opts, std::size_t from_node) {
  const LaplaceKernel ker = laplace_kernel(w, T, opts, from_node);
  LaplaceResult res;
  res.cos_margin = ker.cos_margin;
  double col_max = 0.0;
  cplx acc(0.0, 0.0);
  const std::size_t nm = w.n_m();
  for (std::size_t i = from_node; i < w.n_r(); ++i) {
    const cplx v = w.values[i * nm + j];
    acc += ker.factor[i] * v;
    col_max = std::max(col_max, std::abs(v) * std::exp(-w.nu * std::pow(w.radial.nodes[i], w.k)));
  }
  res.value = acc;
  res.trunc_estimate = laplace_tail(w, ker, col_max);
  if (opts.enforce_trunc && res.trunc_estimate > opts.trunc_tol * (std::abs(acc) + 1e-300))
    throw numeric_error("laplace_k: truncation bound " + std::to_string(res.trunc_estimate) +
                        " exceeds tolerance");
  return res;
}

MLine laplace_k_all(const BorelGrid& w, cplx T, const LaplaceOptions& opts,
                    std::size_t from_node) {
  const LaplaceKernel ker = laplace_kernel(w, T, opts, from_node);
  MLine out;
  out.m = w.m_nodes;
  out.v.assign(w.n_m(), cplx(0.0, 0.0));
  const std::size_t nm = w.n_m();
  double grid_max = 0.0, out_max = 0.0;
  for (std::size_t i = from_node; i < w.n_r(); ++i) {
    const cplx f = ker.factor[i];
    const cplx* row = &w.values[i * nm];
    double env = std::exp(-w.nu * std::pow(w.radial.nodes[i], w.k));
    for (std::size_t j = 0; j < nm; ++j) {
      out.v[j] += f * row[j];
      grid_max = std::max(grid_max, std::abs(row[j]) * env);
    }
  }
  for (const auto& v : out.v) out_max = std::max(out_max, std::abs(v));
  const double tail = laplace_tail(w, ker, grid_max);
  if (opts.enforce_trunc && tail > opts.trunc_tol * (out_max + 1e-300))
    throw numeric_error("laplace_k: truncation bound exceeds tolerance");
  return out;
}

cplx laplace_series_k(const RadialRule& rule, double gamma, double k,
                      const std::vector<cplx>& v, cplx eps) {
  if (v.size() != rule.size())
    throw validation_error("laplace_series_k: sample count does not match the rule");
  const double phi = wrap_angle(gamma - std::arg(eps));
  if (std::cos(k * phi) <= 0.0)
    throw numeric_error("laplace_series_k: inadmissible direction");
  const double ek = std::pow(std::abs(eps), k);
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = rule.nodes[i];
    const double rk = std::pow(r, k);
    const cplx exponent = -(rk / ek) * cplx(std::cos(k * phi), std::sin(k * phi));
    // u^{k-1} du along the ray carries the phase e^{ik gamma} in total
    const cplx uk1_du = ray_pow(r, gamma, k) / r;
    acc += rule.weights[i] * v[i] * std::exp(exponent) * k * uk1_du;
  }
  return acc / principal_pow(eps, k);
}

std::vector<cplx> borel_k(const std::vector<cplx>& coeffs, double k) {
  std::vector<cplx> out(coeffs.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    out[j] = coeffs[j] * std::exp(-std::lgamma(1.0 + j / k));
  return out;
}

FourierResult fourier_inverse(const MLine& f, cplx z, double beta) {
  if (f.m.size() < 2) throw validation_error("fourier_inverse: need at least two nodes");
  if (std::abs(z.imag()) >= beta)
    throw numeric_error("fourier_inverse: |Im z| >= beta, integral not controlled");
  const double dm = f.m[1] - f.m[0];
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < f.m.size(); ++j) {
    const double wgt = (j == 0 || j + 1 == f.m.size()) ? 0.5 : 1.0;
    acc += wgt * f.v[j] * std::exp(cplx(0.0, 1.0) * z * f.m[j]);
  }
  FourierResult res;
  res.value = acc * dm / std::sqrt(2.0 * pi);
  const double M = std::max(std::abs(f.m.front()), std::abs(f.m.back()));
  const double edge = std::max(std::abs(f.v.front()), std::abs(f.v.back()));
  const double rate = beta - std::abs(z.imag());
  res.tail_estimate = edge * std::exp(std::abs(z.imag()) * M) / std::max(rate, 1e-12);
  return res;
}

double norm_beta_mu(const MLine& f, double beta, double mu, NormDiag* diag) {
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < f.m.size(); ++j) {
    const double am = std::abs(f.m[j]);
    const double v = std::pow(1.0 + am, mu) * std::exp(beta * am) * std::abs(f.v[j]);
    if (v > best) {
      best = v;
      arg = j;
    }
  }
  if (diag) {
    diag->arg_m = arg;
    diag->boundary = (arg == 0 || arg + 1 == f.m.size());
  }
  return best;
}

double norm_f(const BorelGrid& w, NormDiag* diag) {
  double best = 0.0;
  std::size_t ar = 0, am_idx = 0;
  const std::size_t nm = w.n_m();
  for (std::size_t i = 0; i < w.n_r(); ++i) {
    const double rk = std::pow(w.radial.nodes[i], w.k);
    const double tau_weight = (1.0 + rk * rk) / rk * std::exp(-w.nu * rk);
    for (std::size_t j = 0; j < nm; ++j) {
      const double amv = std::abs(w.m_nodes[j]);
      const double v = std::pow(1.0 + amv, w.mu) * std::exp(w.beta * amv) * tau_weight *
                       std::abs(w.values[i * nm + j]);
      if (v > best) {
        best = v;
        ar = i;
        am_idx = j;
      }
    }
  }
  if (diag) {
    diag->arg_r = ar;
    diag->arg_m = am_idx;
    diag->boundary = (ar + 1 == w.n_r() || am_idx == 0 || am_idx + 1 == nm);
  }
  return best;
}

}  // namespace borelsum
