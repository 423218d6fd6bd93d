#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bernoulli/config.hpp"
#include "bernoulli/field.hpp"
#include "bernoulli/flatness.hpp"
#include "bernoulli/graph.hpp"

namespace bernoulli {

// ----------------------------------------------------------------------------
// radial solution by ODE integration
// ----------------------------------------------------------------------------

struct RadialProfile {
    int n = 3;
    double rho0 = 1.0;
    double step = 0.0;
    std::vector<double> u, du;

    double rho(int i) const { return rho0 + i * step; }
    double eval(double rho) const;        // cubic Hermite on the stored samples
    double eval_deriv(double rho) const;
};

// Integrates u'' + (n-1) u'/rho = 0 from rho = 1 with u(1) = 0, u'(1) = 1
// (classic RK4). Throws StepSizeError when step > 1e-3.
RadialProfile solve_radial(int n, double rho_max, double step);

// ----------------------------------------------------------------------------
// inner mixed boundary-value solve on the quarter slice
// ----------------------------------------------------------------------------

struct ZeroSet {
    enum class Kind { None, Subgraph, Ball } kind = Kind::None;
    const FreeBoundaryGraph* graph = nullptr;
    double ball_radius = 0.0;

    static ZeroSet none() { return {}; }
    static ZeroSet subgraph(const FreeBoundaryGraph* g) {
        return {Kind::Subgraph, g, 0.0};
    }
    static ZeroSet ball(double radius) { return {Kind::Ball, nullptr, radius}; }

    bool contains(double r, double z) const;
};

// Assembled five-point system: flux-form axisymmetric stencil in the bulk,
// Shortley-Weller cut arms against the zero set, Neumann rows on the axis and
// on {z = 0} outside the zero set, Dirichlet data on the top/outer boundary.
struct MixedStencil {
    Grid2D grid;
    int dim_n = 3;
    std::vector<std::uint8_t> fixed;  // 1 = value pinned (zero set or far data)
    std::vector<double> cW, cE, cS, cN, inv_cC, rhs;
    std::vector<double> fixed_value;
};

MixedStencil build_mixed_stencil(const Grid2D& quarter, int n, const ZeroSet& zs,
                                 const std::function<double(double, double)>& far_data,
                                 bool bottom_dirichlet = false);

// Red-black SOR kernels. The OpenMP variant parallelizes over rows of one
// color and is bitwise identical to the serial reference.
void sor_sweep_serial(const MixedStencil& st, std::vector<double>& u, int color, double omega);
void sor_sweep_omp(const MixedStencil& st, std::vector<double>& u, int color, double omega);
double stencil_residual_serial(const MixedStencil& st, const std::vector<double>& u);
double stencil_residual_omp(const MixedStencil& st, const std::vector<double>& u);

struct MixedSolveOptions {
    double tol = 1e-10;
    long max_sweeps = 400000;
    double omega = 0.0;            // 0 = pick from the grid spectral estimate
    bool bottom_dirichlet = false; // pin {z = 0} to the data instead of symmetry
};

struct MixedSolveStats {
    long sweeps = 0;
    double residual = 0.0;
    double omega = 0.0;
};

// Throws LinearSolveFailure when the sweep budget is exhausted.
ScalarField2D solve_laplace_mixed(const Grid2D& quarter, int n, const ZeroSet& zs,
                                  const std::function<double(double, double)>& far_data,
                                  const MixedSolveOptions& opts = {},
                                  const ScalarField2D* warm_start = nullptr,
                                  MixedSolveStats* stats = nullptr);

// ----------------------------------------------------------------------------
// trial free-boundary iteration
// ----------------------------------------------------------------------------

struct SolveState {
    ScalarField2D field;  // quarter slice, z0 = 0
    FreeBoundaryGraph graph;
    double b = 0.0, c = 0.0;
    double tau = 0.0;
    double tip_gain = 0.3;  // sign-flip damped gain of the tip channel
    double prev_tip = 0.0;
    int iteration = 0;
    double fb_residual = 1e300;
    double coeff_increment = 1e300;
    std::vector<double> residual_history;
};

struct SolveResult {
    SolveState state;
    ScalarField2D full_field;  // even mirror of the quarter solution
    ExpansionCoefficients coeffs;
    bool converged = false;
    std::string message;
};

// Fixed-point loop: inner solve, graph update g += tau (|grad u| - 1) along
// the normal (horizontal tip handling within 5h of the tip, tip re-anchored
// at r = 1), periodic far-field (b, c) refresh through the coefficient
// extraction. Non-convergence returns the best state with converged = false.
SolveResult solve_axisymmetric(const ProblemConfig& cfg);
SolveResult resume_axisymmetric(const ProblemConfig& cfg, const SolveState& restored);

// Free-boundary gradient residuals measured along the graph.
struct FbResidual {
    double sup = 0.0;
    double tip = 0.0;
    std::vector<double> per_sample;  // |grad u| - 1 at each usable graph node
    std::vector<int> sample_index;
};

FbResidual measure_fb_residual(const ScalarField2D& field, const FreeBoundaryGraph& graph);

struct SolutionReport {
    double harmonicity_residual = 0.0;
    double harmonicity_bound = 0.0;  // C h^2 it is checked against
    double fb_residual = 0.0;
    double max_gradient = 0.0;
    double gradient_bound = 0.0;  // 1 + 10 h
    bool graphical = false;
    bool g_monotone = false;
    bool g_bounded = false;
    double g_growth_tail = 0.0;  // g(R/2) - g(R/4)

    bool pass(const ProblemConfig& cfg) const;
};

SolutionReport verify_solution(const ScalarField2D& full_field, const FreeBoundaryGraph& graph,
                               const ProblemConfig& cfg);

// Checkpoints: field.csv + graph.csv + state.json; identical config resumes
// bit-exactly (CSV floats round-trip).
void save_checkpoint(const SolveState& state, const std::string& dir);
SolveState load_checkpoint(const std::string& dir, const ProblemConfig& cfg);

}  // namespace bernoulli
