#include "borelsum/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace borelsum {

nlohmann::json to_json(const ValidationReport& rep) {
  nlohmann::json j;
  j["passed"] = rep.passed();
  j["annulus"] = {{"r1", rep.r1}, {"r2", rep.r2}, {"direction", rep.direction},
                  {"aperture", rep.aperture}};
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"name", e.name}, {"passed", e.passed}, {"detail", e.detail}});
  j["hypotheses"] = entries;
  return j;
}

nlohmann::json to_json(const CoveringData& cov) {
  nlohmann::json j;
  j["varsigma"] = cov.varsigma;
  j["eps0"] = cov.eps0;
  j["theta"] = cov.theta;
  j["rho"] = cov.rho;
  j["min_singularity"] = cov.min_singularity;
  j["sector_aperture"] = cov.sector_aperture;
  j["time_sector"] = {{"direction", cov.time_sector.direction},
                      {"aperture", cov.time_sector.aperture},
                      {"radius", cov.time_sector.radius}};
  nlohmann::json secs = nlohmann::json::array();
  for (std::size_t p = 0; p < cov.eps_sectors.size(); ++p)
    secs.push_back({{"direction", cov.eps_sectors[p].direction},
                    {"aperture", cov.eps_sectors[p].aperture},
                    {"borel_direction", cov.directions[p]}});
  j["sectors"] = secs;
  j["checks"] = cov.checks;
  j["warnings"] = cov.warnings;
  return j;
}

nlohmann::json to_json(const HBoundEstimates& est) {
  return {{"A_H", est.A},       {"B_H", est.B},   {"eta2", est.eta2},
          {"K1", est.k1},       {"margins", est.margins},
          {"min_ratio_sector", est.min_ratio_sector}};
}

nlohmann::json to_json(const SmallnessLedger& led) {
  nlohmann::json j;
  j["pass"] = led.pass;
  j["varpi"] = led.varpi;
  j["constants"] = {{"C3", led.c3},   {"Kf", led.kf},     {"eta2", led.eta2},
                    {"K1", led.k1},   {"C5_max", led.c5_max}, {"C7_max", led.c7_max}};
  j["lin_coeff"] = led.lin_coeff;
  j["quad_coeff"] = led.quad_coeff;
  j["force_term"] = led.force_term;
  if (led.pass) {
    j["incl_lhs_at_varpi"] = led.incl_lhs(led.varpi);
    j["shrink_lhs_at_varpi"] = led.shrink_lhs(led.varpi);
  }
  return j;
}

nlohmann::json to_json(const IterationTrace& tr) {
  nlohmann::json j;
  j["iterations"] = tr.iterations;
  j["converged"] = tr.converged;
  j["final_diff"] = tr.final_diff;
  j["final_norm"] = tr.final_norm;
  j["iterate_norms"] = tr.iterate_norms;
  j["diff_norms"] = tr.diff_norms;
  j["ratios"] = tr.ratios;
  j["timings"] = {{"wall_ms", tr.wall_ms}};  // non-deterministic, kept out of CSVs
  return j;
}

nlohmann::json to_json(const GevreyFit& fit) {
  nlohmann::json j;
  j["log_K"] = fit.log_k;
  j["K"] = std::exp(fit.log_k);
  j["M"] = fit.m_rate;
  j["r2"] = fit.r2;
  j["kappa_hat"] = fit.kappa_hat;
  j["kappa_r2"] = fit.kappa_r2;
  j["rows_used"] = fit.rows_used;
  nlohmann::json scan = nlohmann::json::array();
  for (const auto& [kappa, r2] : fit.scan) scan.push_back({{"kappa", kappa}, {"r2", r2}});
  j["scan"] = scan;
  return j;
}

nlohmann::json to_json(const SweepResult& sweep) {
  nlohmann::json j;
  j["sigma_prime"] = sweep.sigma_prime;
  j["delta1"] = sweep.delta1;
  j["overlap_index"] = sweep.overlap_index;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : sweep.rows) {
    nlohmann::json row = {{"eps_abs", r.eps_abs},   {"eps_arg", r.eps_arg},
                          {"supdiff", r.supdiff},   {"max_u", r.max_u},
                          {"noise", r.noise_estimate}, {"path_defect", r.path_defect},
                          {"path_direct", r.path_direct}, {"ok", r.ok}};
    if (!r.ok) row["error"] = r.error;
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

namespace {
std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}
}  // namespace

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "eps_abs,eps_arg,supdiff,max_u,noise,path_defect,path_direct,ok\n";
  for (const auto& r : sweep.rows)
    out << fmt(r.eps_abs) << ',' << fmt(r.eps_arg) << ',' << fmt(r.supdiff) << ','
        << fmt(r.max_u) << ',' << fmt(r.noise_estimate) << ',' << fmt(r.path_defect) << ','
        << fmt(r.path_direct) << ',' << (r.ok ? 1 : 0) << "\n";
}

void write_fit_curve_csv(const SweepResult& sweep, double k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "inv_eps_pow_k,log_supdiff\n";
  for (const auto& r : sweep.rows) {
    if (!r.ok || r.supdiff <= 0.0) continue;
    out << fmt(std::pow(r.eps_abs, -k)) << ',' << fmt(std::log(r.supdiff)) << "\n";
  }
}

}  // namespace borelsum
