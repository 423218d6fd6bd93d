#pragma once

#include <string>
#include <vector>

namespace bernoulli {

// Run parameters shared by the solver and the diagnostic pipelines.
// Dimensions 4..6 are accepted but reports flag them as conditional.
struct ProblemConfig {
    int n = 3;             // ambient dimension, 3..6
    double h = 0.05;       // grid spacing
    double r_max = 32.0;   // horizontal extent
    double z_max = 16.0;   // vertical extent (full field spans [-z_max, z_max])

    // tolerances
    double tol_fb = 5e-3;        // sup | |grad u| - 1 | on the free boundary
    double tol_c = 1e-3;         // far-field coefficient increments
    double tol_w = 1e-3;         // Weiss monotonicity slack
    double tol_symmetry = 1e-4;  // reflection deficit slack
    double tol_mean_convexity = 1e-3;
    double tol_eigen = 1e-3;     // outer stability eigenvalue slack
    double inner_tol = 1e-10;    // linear-system residual target
    double harmonicity_c = 10.0; // harmonicity residual bound = C * h^2

    // solver knobs
    double tau = 0.4;       // free-boundary under-relaxation, (0, 0.5]
    int max_outer = 400;
    int coeff_refresh = 8;  // outer steps between far-field refreshes
    double b_init = 0.5;
    double c_init = 0.25;

    // dyadic annulus scales seeding coefficient extraction
    std::vector<double> scales = {4.0, 8.0, 16.0};

    double far_field_m = 8.0;  // |x| >= M threshold for far gradient checks

    void validate() const;  // throws ConfigError on violated invariants
    bool conditional() const { return n > 3; }
};

// Plain-text "key = value" config with '#' comments. Unknown keys are rejected.
ProblemConfig parse_config_text(const std::string& text);
ProblemConfig load_config(const std::string& path);

// Apply "key=value,key=value" overrides (same key set as the file format).
void apply_overrides(ProblemConfig& cfg, const std::string& overrides);

std::string config_to_text(const ProblemConfig& cfg);

}  // namespace bernoulli
