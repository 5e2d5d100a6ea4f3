#include "borelsum/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "borelsum/types.hpp"

namespace borelsum {

namespace {

// Recurrence coefficients of the monic Jacobi polynomials for the weight
// (1-x)^alpha (1+x)^beta on [-1,1]:  pi_{j+1} = (x - a_j) pi_j - b_j^2 pi_{j-1}.
struct JacobiRecurrence {
  std::vector<double> a;   // a_0 .. a_{n-1}
  std::vector<double> b2;  // b_1^2 .. b_{n-1}^2
  double mu0;              // integral of the weight
};

JacobiRecurrence jacobi_recurrence(double alpha, double beta, int n) {
  JacobiRecurrence rec;
  rec.a.resize(n);
  rec.b2.resize(n > 1 ? n - 1 : 0);
  const double s = alpha + beta;
  rec.a[0] = (beta - alpha) / (s + 2.0);
  for (int j = 1; j < n; ++j) {
    const double d = 2.0 * j + s;
    rec.a[j] = (beta * beta - alpha * alpha) / (d * (d + 2.0));
  }
  for (int j = 1; j < n; ++j) {
    const double d = 2.0 * j + s;
    rec.b2[j - 1] = 4.0 * j * (j + alpha) * (j + beta) * (j + s) /
                    (d * d * (d + 1.0) * (d - 1.0));
  }
  rec.mu0 = std::exp((s + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                     std::lgamma(beta + 1.0) - std::lgamma(s + 2.0));
  return rec;
}

// Number of eigenvalues of the Jacobi matrix below lambda (Sturm count).
int sturm_count(const JacobiRecurrence& rec, int n, double lambda) {
  int count = 0;
  double d = rec.a[0] - lambda;
  if (d < 0.0) ++count;
  for (int j = 1; j < n; ++j) {
    double prev = d;
    if (std::abs(prev) < 1e-300) prev = (prev < 0.0 ? -1e-300 : 1e-300);
    d = (rec.a[j] - lambda) - rec.b2[j - 1] / prev;
    if (d < 0.0) ++count;
  }
  return count;
}

QuadRule build_rule(double alpha, double beta, int n) {
  if (alpha <= -1.0 || beta <= -1.0)
    throw validation_error("gauss_jacobi: weight exponents must be > -1");
  if (n < 1) throw validation_error("gauss_jacobi: need at least one node");

  const JacobiRecurrence rec = jacobi_recurrence(alpha, beta, n);

  // Gershgorin interval containing all eigenvalues.
  double lo = -1.0, hi = 1.0;
  for (int j = 0; j < n; ++j) {
    double r = 0.0;
    if (j > 0) r += std::sqrt(rec.b2[j - 1]);
    if (j + 1 < n) r += std::sqrt(rec.b2[j]);
    lo = std::min(lo, rec.a[j] - r);
    hi = std::max(hi, rec.a[j] + r);
  }

  QuadRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double a = lo, b = hi;
    for (int it = 0; it < 120 && (b - a) > 1e-16 * (std::abs(a) + std::abs(b) + 1.0); ++it) {
      const double mid = 0.5 * (a + b);
      if (sturm_count(rec, n, mid) > i)
        b = mid;
      else
        a = mid;
    }
    rule.x[i] = 0.5 * (a + b);
  }

  // Weights via the Christoffel function: w_i = 1 / sum_j p_j(x_i)^2 with
  // p_j the orthonormal polynomials.
  for (int i = 0; i < n; ++i) {
    const double x = rule.x[i];
    double pm = 0.0;
    double p = 1.0 / std::sqrt(rec.mu0);
    double sum = p * p;
    for (int j = 0; j + 1 < n; ++j) {
      const double bj1 = std::sqrt(rec.b2[j]);
      const double pn = ((x - rec.a[j]) * p - (j > 0 ? std::sqrt(rec.b2[j - 1]) : 0.0) * pm) / bj1;
      pm = p;
      p = pn;
      sum += p * p;
    }
    rule.w[i] = 1.0 / sum;
  }
  return rule;
}

std::map<std::tuple<double, double, int>, QuadRule> g_cache;
std::mutex g_cache_mutex;

}  // namespace

const QuadRule& gauss_jacobi(double alpha, double beta, int n) {
  const auto key = std::make_tuple(alpha, beta, n);
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_cache.find(key);
  if (it == g_cache.end()) it = g_cache.emplace(key, build_rule(alpha, beta, n)).first;
  return it->second;
}

QuadRule gauss_legendre(int n, double a, double b) {
  const QuadRule& ref = gauss_jacobi(0.0, 0.0, n);
  QuadRule out;
  out.x.resize(n);
  out.w.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    out.x[i] = mid + half * ref.x[i];
    out.w[i] = half * ref.w[i];
  }
  return out;
}

QuadRule gauss_jacobi_left(double beta, int n, double c) {
  // h = c (1+x)/2 maps [-1,1] to [0,c]; h^beta dh = (c/2)^{beta+1} (1+x)^beta dx.
  const QuadRule& ref = gauss_jacobi(0.0, beta, n);
  QuadRule out;
  out.x.resize(n);
  out.w.resize(n);
  const double scale = std::pow(0.5 * c, beta + 1.0);
  for (int i = 0; i < n; ++i) {
    out.x[i] = 0.5 * c * (1.0 + ref.x[i]);
    out.w[i] = scale * ref.w[i];
  }
  return out;
}

QuadRule gauss_jacobi_right(double alpha, int n, double c) {
  // c - h = u with u^alpha handled as a left-weighted rule, then reflected.
  QuadRule left = gauss_jacobi_left(alpha, n, c);
  QuadRule out;
  out.x.resize(n);
  out.w.resize(n);
  for (int i = 0; i < n; ++i) {
    out.x[i] = c - left.x[n - 1 - i];
    out.w[i] = left.w[n - 1 - i];
  }
  return out;
}

}  // namespace borelsum
