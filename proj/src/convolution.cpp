#include "borelsum/convolution.hpp"

#include <algorithm>
#include <cmath>

#include "borelsum/gauss.hpp"

namespace borelsum {

void KernelParams::validate() const {
  if (!(k > 0.5 && k < 1.0)) throw validation_error("KernelParams: k must lie in (1/2,1)");
  if (gamma2 <= -1.0) throw validation_error("KernelParams: gamma2 <= -1");
  if (gamma3 < 0.0) throw validation_error("KernelParams: gamma3 < 0");
}

bool KernelParams::cut_disc_natural(double tol) const {
  const double v = k * (gamma2 + gamma3 + 2.0);
  return std::abs(v - std::round(v)) < tol && std::round(v) >= 1.0;
}

void ConvOperator::apply(const BorelGrid& in, BorelGrid& out, int workers) const {
  if (rows.size() != in.n_r() || out.values.size() != in.values.size())
    throw validation_error("ConvOperator: grid layout mismatch");
  const std::size_t nm = in.n_m();
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    const Row& row = rows[i];
    cplx* dst = &out.values[i * nm];
    std::fill(dst, dst + nm, cplx(0.0, 0.0));
    for (const Term& t : row.terms) {
      if (t.idx == 0) continue;  // virtual node at r = 0, value 0
      const cplx* src = &in.values[(t.idx - 1) * nm];
      const double w = t.w;
      for (std::size_t j = 0; j < nm; ++j) dst[j] += w * src[j];
    }
    const cplx pref = row.prefactor * scale;
    for (std::size_t j = 0; j < nm; ++j) dst[j] *= pref;
  });
}

BorelGrid ConvOperator::apply(const BorelGrid& in, int workers) const {
  BorelGrid out = zero_like(in);
  apply(in, out, workers);
  return out;
}

namespace {

// Adds quadrature contributions w_s * extra(h_s) * f(h_s^{1/k}) for one panel.
void add_panel(ConvOperator::Row& row, const RadialRule& rule, double inv_k,
               const QuadRule& q, const std::function<double(double)>& extra) {
  for (std::size_t s = 0; s < q.x.size(); ++s) {
    const double h = q.x[s];
    const double wgt = q.w[s] * extra(h);
    if (wgt == 0.0 || h <= 0.0) continue;
    const InterpStencil st = interp_stencil(rule, std::pow(h, inv_k));
    for (int a = 0; a < 4; ++a) {
      if (st.w[a] == 0.0) continue;
      row.terms.push_back({static_cast<std::uint32_t>(st.first + a), wgt * st.w[a]});
    }
  }
}

}  // namespace

ConvOperator make_conv_operator(const RadialRule& rule, double gamma,
                                const KernelParams& params, int nodes) {
  params.validate();
  const double k = params.k, g2 = params.gamma2, g3 = params.gamma3;
  const double inv_k = 1.0 / k;
  ConvOperator op;
  op.rows.resize(rule.size());
  // phase of tau^k * e^{ik gamma (g2+g3+1)} ds with all powers on the ray
  const cplx phase = std::polar(1.0, k * gamma * (g2 + g3 + 2.0));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = std::pow(rule.nodes[i], k);
    ConvOperator::Row& row = op.rows[i];
    row.prefactor = x * phase;
    row.terms.reserve(static_cast<std::size_t>(4 * nodes * 4));

    const double c = x / 16.0;
    // [0, x/16]: Jacobi weight h^{g3} exact, remaining factor (x-h)^{g2}
    add_panel(row, rule, inv_k, gauss_jacobi_left(g3, nodes, c),
              [&](double h) { return std::pow(x - h, g2); });
    // [x/16, x/2] and [x/2, 15x/16]: plain Gauss-Legendre on the full integrand
    for (const auto& [a, b] : {std::pair{c, x / 2.0}, std::pair{x / 2.0, x - c}}) {
      add_panel(row, rule, inv_k, gauss_legendre(nodes, a, b),
                [&](double h) { return std::pow(x - h, g2) * std::pow(h, g3); });
    }
    // [15x/16, x]: Jacobi weight (x-h)^{g2} exact via u = x - h
    {
      const QuadRule q = gauss_jacobi_left(g2, nodes, c);
      QuadRule mirrored;
      mirrored.x.resize(q.x.size());
      mirrored.w = q.w;
      for (std::size_t s = 0; s < q.x.size(); ++s) mirrored.x[s] = x - q.x[s];
      add_panel(row, rule, inv_k, mirrored, [&](double h) { return std::pow(h, g3); });
    }
  }
  return op;
}

BorelGrid conv_power_kernel(const BorelGrid& w, const KernelParams& params, int workers) {
  if (params.k != w.k)
    throw validation_error("conv_power_kernel: kernel k differs from the grid's k");
  const ConvOperator op = make_conv_operator(w.radial, w.gamma, params);
  return op.apply(w, workers);
}

ConvOperator make_ck_operator(const RadialRule& rule, double gamma, double k, int nodes) {
  KernelParams params{1.0 / k - 2.0, 0.0, k};
  ConvOperator op = make_conv_operator(rule, gamma, params, nodes);
  op.scale = k / std::tgamma(1.0 / k - 1.0);
  return op;
}

BorelGrid c_k(const BorelGrid& w, int workers) {
  const ConvOperator op = make_ck_operator(w.radial, w.gamma, w.k);
  return op.apply(w, workers);
}

ExpCkResult exp_neg_kappa_ck(const BorelGrid& w, double kappa, double tol, int p_max,
                             int workers) {
  const ConvOperator ck = make_ck_operator(w.radial, w.gamma, w.k);
  return exp_neg_kappa_ck(ck, w, kappa, tol, p_max, workers);
}

ExpCkResult exp_neg_kappa_ck(const ConvOperator& ck, const BorelGrid& w, double kappa,
                             double tol, int p_max, int workers) {
  if (kappa < 0.0) throw validation_error("exp_neg_kappa_ck: kappa must be >= 0");
  ExpCkResult res;
  res.grid = w;
  res.term_maxes.push_back(w.max_abs());
  if (kappa == 0.0) return res;

  BorelGrid term = w;
  BorelGrid next = zero_like(w);
  double accum_max = res.term_maxes[0];
  for (int p = 1; p <= p_max; ++p) {
    ck.apply(term, next, workers);
    const cplx factor = -kappa / static_cast<double>(p);
    for (auto& v : next.values) v *= factor;
    std::swap(term.values, next.values);
    add_scaled(res.grid, cplx(1.0, 0.0), term);
    const double tmax = term.max_abs();
    res.term_maxes.push_back(tmax);
    res.terms = p;
    accum_max = std::max(accum_max, tmax);
    if (tmax <= tol * accum_max) {
      const double prev = res.term_maxes[res.term_maxes.size() - 2];
      const double q = prev > 0.0 ? std::min(tmax / prev, 0.99) : 0.0;
      res.tail_estimate = tmax * q / (1.0 - q);
      return res;
    }
  }
  throw convergence_error("exp_neg_kappa_ck: series did not meet tolerance within p_max terms");
}

double estimate_k1(double k, double nu, const std::vector<BorelGrid>& samples, int n_max,
                   double safety) {
  if (samples.empty()) throw validation_error("estimate_k1: need at least one sample");
  double k1 = 0.0;
  for (const BorelGrid& f : samples) {
    // C2: smallest constant with |f| <= C2 |tau|^k e^{nu |tau|^k} (m profile)
    const std::size_t nm = f.n_m();
    auto envelope = [&](std::size_t i, std::size_t j, int N) {
      const double rk = std::pow(f.radial.nodes[i], k);
      const double am = std::abs(f.m_nodes[j]);
      return std::pow(rk, N + 1) * std::exp(nu * rk) * std::pow(1.0 + am, -f.mu) *
             std::exp(-f.beta * am);
    };
    double c2 = 0.0;
    for (std::size_t i = 0; i < f.n_r(); ++i)
      for (std::size_t j = 0; j < nm; ++j)
        c2 = std::max(c2, std::abs(f.at(i, j)) / envelope(i, j, 0));
    if (c2 == 0.0) continue;

    const ConvOperator ck_raw = make_conv_operator(f.radial, f.gamma, {1.0 / k - 2.0, 0.0, k});
    const double unit = k / std::tgamma(1.0 / k - 1.0);
    BorelGrid iter = f;
    for (int N = 1; N <= n_max; ++N) {
      iter = ck_raw.apply(iter);
      for (auto& v : iter.values) v *= unit;
      double sN = 0.0;
      for (std::size_t i = 0; i < f.n_r(); ++i)
        for (std::size_t j = 0; j < nm; ++j)
          sN = std::max(sN, std::abs(iter.at(i, j)) /
                                (c2 * std::pow(unit, N) * envelope(i, j, N)));
      if (sN > 0.0) k1 = std::max(k1, std::pow(sN, 1.0 / N));
    }
  }
  if (k1 <= 0.0) throw numeric_error("estimate_k1: all samples vanish");
  return safety * k1;
}

namespace {

struct NlpNode {
  double weight;              // W_s / ((x - h) h)
  InterpStencil left;         // radius (x - h)^{1/k}, factor w1
  InterpStencil right;        // radius h^{1/k}, factor w2
};

std::vector<std::vector<NlpNode>> make_nlp_rules(const RadialRule& rule, double k,
                                                 int nodes_per_panel) {
  const double inv_k = 1.0 / k;
  std::vector<std::vector<NlpNode>> rules(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = std::pow(rule.nodes[i], k);
    // geometric grading toward both endpoints where 1/((x-h)h) concentrates
    const double b0 = x / 512.0, b1 = x / 64.0, b2 = x / 8.0, mid = x / 2.0;
    const std::pair<double, double> panels[8] = {
        {0.0, b0},      {b0, b1},          {b1, b2},          {b2, mid},
        {mid, x - b2},  {x - b2, x - b1},  {x - b1, x - b0},  {x - b0, x}};
    auto& out = rules[i];
    out.reserve(8 * nodes_per_panel);
    for (const auto& [a, b] : panels) {
      const QuadRule q = gauss_legendre(nodes_per_panel, a, b);
      for (std::size_t s = 0; s < q.x.size(); ++s) {
        const double h = q.x[s];
        if (h <= 0.0 || h >= x) continue;
        NlpNode node;
        node.weight = q.w[s] / ((x - h) * h);
        node.left = interp_stencil(rule, std::pow(x - h, inv_k));
        node.right = interp_stencil(rule, std::pow(h, inv_k));
        out.push_back(node);
      }
    }
  }
  return rules;
}

void check_small_tau(const BorelGrid& w, const char* which) {
  // the integrand is controlled only if |w| ~ |tau|^k near 0
  const double k = w.k;
  const std::size_t nm = w.n_m();
  const std::size_t window = std::min<std::size_t>(2 * w.radial.nodes_per_panel, w.n_r());
  double first = 0.0, rest = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    double row_max = 0.0;
    for (std::size_t j = 0; j < nm; ++j) row_max = std::max(row_max, std::abs(w.values[i * nm + j]));
    const double ratio = row_max / std::pow(w.radial.nodes[i], k);
    if (i == 0)
      first = ratio;
    else
      rest = std::max(rest, ratio);
  }
  if (first > 10.0 * (rest + 1e-300) && first > 0.0)
    throw numeric_error(std::string("nonlinear_product: ") + which +
                        " grows faster than |tau|^k toward 0");
}

}  // namespace

BorelGrid nonlinear_product(const BorelGrid& w1, const BorelGrid& w2,
                            const ComplexPolynomial& Q1, const ComplexPolynomial& Q2,
                            int workers) {
  if (w1.values.size() != w2.values.size() || w1.n_m() != w2.n_m())
    throw validation_error("nonlinear_product: factors on different grids");
  check_small_tau(w1, "first factor");
  check_small_tau(w2, "second factor");

  const std::size_t nm = w1.n_m();
  const std::ptrdiff_t c = static_cast<std::ptrdiff_t>((nm - 1) / 2);
  std::vector<cplx> q1v(nm), q2v(nm);
  for (std::size_t j = 0; j < nm; ++j) {
    q1v[j] = Q1.eval_im(w1.m_nodes[j]);
    q2v[j] = Q2.eval_im(w1.m_nodes[j]);
  }
  const auto rules = make_nlp_rules(w1.radial, w1.k, 10);
  BorelGrid out = zero_like(w1);
  const double prefactor_scale = w1.m_step / std::sqrt(2.0 * pi);

  parallel_for(w1.n_r(), workers, [&](std::size_t i) {
    std::vector<cplx> A(nm), B(nm), acc(nm, cplx(0.0, 0.0));
    auto gather = [&](const BorelGrid& g, const InterpStencil& st, std::vector<cplx>& dst) {
      std::fill(dst.begin(), dst.end(), cplx(0.0, 0.0));
      for (int a = 0; a < 4; ++a) {
        if (st.first + a == 0 || st.w[a] == 0.0) continue;
        const cplx* src = &g.values[(st.first + a - 1) * nm];
        const double wa = st.w[a];
        for (std::size_t j = 0; j < nm; ++j) dst[j] += wa * src[j];
      }
    };
    for (const NlpNode& node : rules[i]) {
      gather(w1, node.left, A);
      gather(w2, node.right, B);
      for (std::size_t j = 0; j < nm; ++j) A[j] *= q1v[j];
      for (std::size_t j = 0; j < nm; ++j) B[j] *= q2v[j];
      // acc[j] += weight * sum_{j1} A[j - j1 + c] B[j1]
      for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(nm); ++j) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, j + c - (static_cast<std::ptrdiff_t>(nm) - 1));
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(nm) - 1, j + c);
        cplx sum(0.0, 0.0);
        const cplx* Aj = A.data() + (j + c);
        for (std::ptrdiff_t j1 = lo; j1 <= hi; ++j1) sum += Aj[-j1] * B[j1];
        acc[j] += node.weight * sum;
      }
    }
    const double xk = std::pow(w1.radial.nodes[i], w1.k);
    cplx* dst = &out.values[i * nm];
    for (std::size_t j = 0; j < nm; ++j) dst[j] = xk * prefactor_scale * acc[j];
  });
  return out;
}

}  // namespace borelsum
