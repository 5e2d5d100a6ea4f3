#pragma once

#include <string>

#include <json.hpp>

#include "borelsum/analysis.hpp"
#include "borelsum/geometry.hpp"
#include "borelsum/problem.hpp"
#include "borelsum/solver.hpp"

namespace borelsum {

nlohmann::json to_json(const ValidationReport& rep);
nlohmann::json to_json(const CoveringData& cov);
nlohmann::json to_json(const HBoundEstimates& est);
nlohmann::json to_json(const SmallnessLedger& led);
nlohmann::json to_json(const IterationTrace& tr);
nlohmann::json to_json(const GevreyFit& fit);
nlohmann::json to_json(const SweepResult& sweep);

void write_json(const nlohmann::json& j, const std::string& path);

/// sweep CSV: eps_abs, eps_arg, supdiff (plus diagnostics columns)
void write_sweep_csv(const SweepResult& sweep, const std::string& path);
/// plot-ready CSV of log(supdiff) against |eps|^{-k}
void write_fit_curve_csv(const SweepResult& sweep, double k, const std::string& path);

}  // namespace borelsum
