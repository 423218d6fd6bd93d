#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bernoulli/field.hpp"
#include "bernoulli/graph.hpp"
#include "bernoulli/report.hpp"

namespace bernoulli {

struct DiagnoseInputs {
    const ScalarField2D* field = nullptr;  // full (even) field
    const FreeBoundaryGraph* graph = nullptr;
    std::optional<double> b, c;  // far-field pair from a solver checkpoint
};

// {weiss, flatness, coeffs, stability, curvature, symmetry, barrier}
std::vector<std::string> all_check_names();

// Runs the selected post-hoc checks and returns a report; companion CSVs land
// in out_dir when nonempty. Checks that need the graph or the far-field pair
// throw ConfigError when those inputs are missing.
DiagnosticsReport run_diagnostics(const DiagnoseInputs& in, const ProblemConfig& cfg,
                                  const std::vector<std::string>& checks,
                                  const std::string& out_dir);

}  // namespace bernoulli
