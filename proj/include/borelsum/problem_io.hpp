#pragma once

#include <string>

#include "borelsum/problem.hpp"

namespace borelsum {

/// Parses the declarative problem format: `key = value...` lines grouped
/// under `[section]` headers, complex numbers as "re im" pairs.
/// Throws validation_error with line/field diagnostics on malformed input.
ProblemSpec load_problem(const std::string& path);
ProblemSpec parse_problem(const std::string& text, const std::string& origin = "<string>");

/// Loads and validates; unless `force`, a failed hypothesis rejects the file.
ProblemSpec load_problem_validated(const std::string& path, const std::vector<double>& m_grid,
                                   bool force = false);

std::string problem_to_text(const ProblemSpec& spec);
void save_problem(const ProblemSpec& spec, const std::string& path);

}  // namespace borelsum
