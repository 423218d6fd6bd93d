// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Returns nonzero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "bernoulli/annulus.hpp"
#include "bernoulli/diagnose.hpp"
#include "bernoulli/energy.hpp"
#include "bernoulli/flatness.hpp"
#include "bernoulli/io.hpp"
#include "bernoulli/reference.hpp"
#include "bernoulli/solver.hpp"
#include "bernoulli/stability.hpp"
#include "bernoulli/symmetry.hpp"

using namespace bernoulli;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
const double kPi = M_PI;

void line(int criterion, const std::string& what, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// --------------------------------------------------------------------------
// criterion 1: radial solution against the closed form
// --------------------------------------------------------------------------
void criterion_1() {
    auto t0 = Clock::now();
    double worst = 0.0;
    for (int n = 3; n <= 6; ++n) {
        RadialProfile prof = solve_radial(n, 100.0, 1e-3);
        for (double rho = 1.0; rho <= 100.0; rho += 0.0103) {
            double exact = (1.0 - std::pow(rho, 2.0 - n)) / (n - 2);
            worst = std::max(worst, std::fabs(prof.eval(rho) - exact));
        }
    }
    double dt = seconds_since(t0);
    line(1, "radial profile matches (1 - rho^{2-n})/(n-2) for n = 3..6",
         worst <= 1e-8 && dt < 1.0, "max dev " + fmt(worst) + ", " + fmt(dt) + " s");
}

// --------------------------------------------------------------------------
// criterion 2: Weiss values and monotonicity
// --------------------------------------------------------------------------
void criterion_2(const ScalarField2D& solver_field, double z_cap) {
    auto t0 = Clock::now();
    bool ok = true;
    std::string detail;

    ScalarField2D hp = ReferenceSolution::half_plane(0, 1).sample(
        Grid2D::make(0.02, 4.4, -4.4, 4.4));
    std::vector<double> wvals;
    for (double r : {0.5, 1.0, 2.0}) {
        double w = weiss(hp, r);
        wvals.push_back(w);
        if (std::fabs(w - 2.0 * kPi / 3.0) > 1e-2) ok = false;
    }
    double spread = *std::max_element(wvals.begin(), wvals.end()) -
                    *std::min_element(wvals.begin(), wvals.end());
    if (spread > 2e-3) ok = false;  // homogeneous case: constant scan
    detail += "W(half-plane) dev " +
              fmt(std::fabs(wvals[1] - 2.0 * kPi / 3.0)) + ", spread " + fmt(spread);

    ScalarField2D wedge = ReferenceSolution::wedge(0, 1).sample(
        Grid2D::make(0.02, 4.4, -4.4, 4.4));
    double wed = weiss(wedge, 1.0);
    if (std::fabs(wed - 4.0 * kPi / 3.0) > 2e-2) ok = false;

    ScalarField2D r3 = ReferenceSolution::radial(3).sample(Grid2D::make(0.1, 34.0, -34.0, 34.0));
    WeissScan rs = weiss_scan(r3, {0.5, 2.0, 8.0, 32.0}, 1e-3);
    if (!rs.violations.empty()) ok = false;

    double solver_top = std::floor(z_cap) - 0.5;
    WeissScan ss = weiss_scan(solver_field, {2.0, 4.0, 8.0, solver_top}, 1e-3);
    if (!ss.violations.empty()) ok = false;

    double dt = seconds_since(t0);
    if (dt >= 10.0) ok = false;
    line(2, "Weiss oracles and monotone scans", ok, detail + ", " + fmt(dt) + " s");
}

// --------------------------------------------------------------------------
// criterion 3: flatness machinery
// --------------------------------------------------------------------------
void criterion_3() {
    bool ok = true;
    std::string detail;

    // two-sup formula against the sandwich-definition bisection
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        double phi_f = 0.3 * U(rng), bb = 0.2 * U(rng), cc = 0.2 * U(rng);
        auto f = [&](double xi, double zeta) {
            double rho = std::hypot(xi, zeta);
            return std::max(0.0, std::sin(phi_f) * xi + std::cos(phi_f) * zeta - bb + cc / rho);
        };
        AnnulusSample s = sample_annulus_fn(f, 2.0, 0.11);
        double phi = 0.4 * U(rng), b = 0.15 * U(rng);
        double direct = shifted_height(s, std::sin(phi), std::cos(phi), b);
        auto feasible = [&](double hh) {
            for (const auto& p : s.pts) {
                double ex = std::sin(phi) * p.xi + std::cos(phi) * p.zeta - b;
                if (std::max(0.0, ex - hh) > p.value + 1e-15) return false;
                if (p.active && p.value > std::max(0.0, ex + hh) + 1e-15) return false;
            }
            return true;
        };
        double lo = 0.0, hi = 4.0;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (feasible(mid) ? hi : lo) = mid;
        }
        worst_gap = std::max(worst_gap, std::fabs(direct - hi));
    }
    if (worst_gap > 1e-9) ok = false;
    detail += "two-sup gap " + fmt(worst_gap);

    // scaling identity on a node-aligned dyadic rescaling
    auto prof = [](double r, double z) {
        double rho = std::hypot(r, z);
        return rho > 0 ? z - 0.2 + 0.15 / rho : 1.0;
    };
    ScalarField2D f1 = sample_meridian(Grid2D::make(0.1, 8.4, -8.4, 8.4), 3, prof);
    ScalarField2D f2(Grid2D::make(0.05, 4.2, -4.2, 4.2), 3);
    for (int j = 0; j < f2.grid.nz; ++j)
        for (int i = 0; i < f2.grid.nr; ++i) f2.value(i, j) = f1.value(i, j) / 2.0;
    f2.refresh_mask();
    double lhs = shifted_height(sample_annulus(f1, 2.0), 0.0, 1.0, 0.1);
    double rhs = 2.0 * shifted_height(sample_annulus(f2, 1.0), 0.0, 1.0, 0.05);
    if (std::fabs(lhs - rhs) > 1e-12) ok = false;
    detail += ", scaling gap " + fmt(std::fabs(lhs - rhs));

    // coefficient recovery from the synthetic far field
    auto synth = [](double r, double z) {
        double rho = std::hypot(r, z);
        return rho > 0 ? z - 0.3 + 0.2 / rho : 1.0;
    };
    ScalarField2D fs = sample_meridian(Grid2D::make(0.1, 34.0, -34.0, 34.0), 3, synth);
    ExtractOptions opt;
    opt.scales = {4.0, 8.0, 16.0};
    ExpansionCoefficients coeffs = extract_coefficients(fs, opt);
    double eb = std::fabs(coeffs.b - 0.3), ec = std::fabs(coeffs.c - 0.2);
    double ed = std::fabs(coeffs.d_prime[0]);
    if (eb > 1e-3 || ec > 1e-3 || ed > 1e-3) ok = false;
    detail += ", coeff err (" + fmt(eb) + "," + fmt(ec) + "," + fmt(ed) + ")";

    // recentring recovers a 0.25 horizontal offset
    auto u3 = [](double x1, double x2, double x3) {
        double rho = std::sqrt((x1 - 0.25) * (x1 - 0.25) + x2 * x2 + x3 * x3);
        return std::max(0.0, x3 - 0.3 + 0.2 / rho);
    };
    ExtractOptions o3;
    o3.scales = {8.0, 16.0, 32.0};
    std::vector<double> x0 = recenter(extract_coefficients_fn3(u3, o3));
    double er = std::hypot(x0[0] - 0.25, x0[1]);
    if (er > 0.01) ok = false;
    detail += ", recenter err " + fmt(er);

    line(3, "flatness: two-sup, scaling identity, extraction, recentring", ok, detail);
}

// --------------------------------------------------------------------------
// criterion 4: solver convergence and asymptotics
// --------------------------------------------------------------------------
void criterion_4(const SolveResult& run, const ProblemConfig& cfg, double solve_seconds) {
    SolutionReport rep = verify_solution(run.full_field, run.state.graph, cfg);
    bool ok = run.converged;
    std::string detail = "fb residual " + fmt(rep.fb_residual);
    if (rep.fb_residual > cfg.tol_fb) ok = false;
    if (rep.harmonicity_residual > rep.harmonicity_bound) ok = false;
    detail += ", harmonicity " + fmt(rep.harmonicity_residual) + " vs " +
              fmt(rep.harmonicity_bound);
    if (!rep.g_monotone || !rep.g_bounded) ok = false;

    const ExpansionCoefficients& coeffs = run.coeffs;
    if (!(coeffs.b > 0.0) || !(coeffs.c > 0.0)) ok = false;
    detail += ", b " + fmt(coeffs.b) + ", c " + fmt(coeffs.c);

    double target = (cfg.n - 2) * coeffs.b * coeffs.c;
    double rel = std::fabs(coeffs.dn_fitted - target) / std::fabs(target);
    if (!(rel <= 0.10)) ok = false;
    detail += ", d_n rel dev " + fmt(rel);

    ScalarField2D upper = upper_part(run.full_field);
    ExtendedField ext{&upper, ReferenceSolution::tilde_v(cfg.n, run.state.b, run.state.c),
                      ExtendedField::Mode::UpperOnly};
    std::vector<HeightRecord> recs = height_records(ext, {8.0, 16.0, 32.0, 64.0}, 1.0 / 64);
    DecayFit fit = decay_fit(recs);
    if (fit.no_decay || fit.gamma < -1.4 || fit.gamma > -0.7) ok = false;
    detail += ", decay gamma " + fmt(fit.gamma);

    if (solve_seconds > 600.0) ok = false;
    detail += ", solve " + fmt(solve_seconds) + " s";
    line(4, "solver convergence, coefficients, decay exponent", ok, detail);
}

// --------------------------------------------------------------------------
// criterion 5: symmetry suite on the solver output
// --------------------------------------------------------------------------
void criterion_5(const SolveResult& run, const ProblemConfig& cfg) {
    const Grid2D& g = run.full_field.grid;
    ExtendedField ext{&run.full_field,
                      ReferenceSolution::tilde_v(cfg.n, run.state.b, run.state.c),
                      ExtendedField::Mode::EvenMirror};
    bool ok = true;
    std::string detail;

    std::vector<double> tv;
    for (double t = 0.0; t <= g.z_max() / 2.0 + 1e-12; t += g.h) tv.push_back(t);
    ReflectionScan vs = reflection_scan_vertical(ext, tv, cfg.tol_symmetry);
    double vmin = *std::min_element(vs.deficit.begin(), vs.deficit.end());
    if (vmin < -1e-4) ok = false;
    detail += "vertical min " + fmt(vmin);

    std::vector<double> th;
    for (double t = 0.0; t <= g.r_max() / 4.0 + 1e-12; t += g.h) th.push_back(t);
    ReflectionScan hs = reflection_scan_horizontal(ext, th, cfg.tol_symmetry);
    double hmin = *std::min_element(hs.deficit.begin(), hs.deficit.end());
    if (hmin < -1e-4) ok = false;
    detail += ", horizontal min " + fmt(hmin);

    GradientSignCheck gs = gradient_sign_check(run.full_field, 8.0);
    if (gs.min_dz < -1e-6 || gs.max_dr > 1e-6 || gs.far_min_dz < 0.70) ok = false;
    detail += ", min dz " + fmt(gs.min_dz) + ", max dr " + fmt(gs.max_dr) + ", far dz " +
              fmt(gs.far_min_dz);

    BarrierCheck bc = barrier_check(run.full_field, run.coeffs.b);
    if (bc.min_all < -1e-3) ok = false;
    detail += ", barrier " + fmt(bc.min_all);
    line(5, "reflection deficits, gradient signs, barrier", ok, detail);
}

// --------------------------------------------------------------------------
// criterion 6: curvature suite
// --------------------------------------------------------------------------
void criterion_6(const SolveResult& run, const ProblemConfig& cfg,
                 const SolveResult& coarse, const SolveResult& fine,
                 const ProblemConfig& small_cfg) {
    bool ok = true;
    std::string detail;

    if (fb_mean_curvature(FbSurface{SphereSurface{1.0}}, 3, 1.0) != 2.0) ok = false;
    for (double rho : {0.5, 1.0, 2.0}) {
        double tmc = total_mean_curvature(FbSurface{SphereSurface{rho}}, 3,
                                          Region::ball(10.0 * rho));
        if (std::fabs(tmc - 16.0 * kPi) > 0.01 * 16.0 * kPi) ok = false;
    }

    const FreeBoundaryGraph& gr = run.state.graph;
    double min_h = 1e300, concavity = -1e300;
    for (int i = 0; i < gr.size(); ++i) {
        double r = gr.r(i);
        if (r < gr.r_tip + 5 * gr.h || r > cfg.r_max / 2.0) continue;
        min_h = std::min(min_h, fb_mean_curvature(gr, cfg.n, r));
        double gp = gr.deriv(r), gpp = gr.second(r);
        concavity = std::max(concavity, gpp + gp * (1 + gp * gp) / r);
    }
    if (min_h < -1e-3) ok = false;
    if (concavity > 1e-3) ok = false;
    detail += "min H " + fmt(min_h) + ", concavity excess " + fmt(concavity);

    Region reg = Region::annulus(0.0, std::min(small_cfg.r_max, small_cfg.z_max) - 1.0);
    double tmc_coarse =
        total_mean_curvature(FbSurface{GraphSurface{&coarse.state.graph}}, cfg.n, reg);
    double tmc_fine =
        total_mean_curvature(FbSurface{GraphSurface{&fine.state.graph}}, cfg.n, reg);
    double change = std::fabs(tmc_fine - tmc_coarse) / std::max(1e-12, tmc_fine);
    if (!std::isfinite(tmc_fine) || change > 0.05) ok = false;
    detail += ", tmc " + fmt(tmc_fine) + ", refinement change " + fmt(change);
    line(6, "curvature anchors, mean convexity, refinement stability", ok, detail);
}

// --------------------------------------------------------------------------
// criterion 7: stability suite
// --------------------------------------------------------------------------
void criterion_7(const SolveResult& run, const ProblemConfig& cfg) {
    bool ok = true;
    std::string detail;

    ScalarField2D r3 = ReferenceSolution::radial(3).sample(Grid2D::make(0.05, 9.5, -9.5, 9.5));
    FbSurface sphere = SphereSurface{1.0};
    TestFunction phi_r;
    phi_r.value = [](double r, double z) {
        double rho = std::hypot(r, z);
        return rho > 1e-9 ? std::max(0.0, 1.0 / rho - 0.25) : 0.0;
    };
    phi_r.grad = [](double r, double z) -> std::array<double, 2> {
        double rho = std::hypot(r, z);
        if (rho < 1e-9 || 1.0 / rho - 0.25 <= 0.0) return {0.0, 0.0};
        double d = -1.0 / (rho * rho);
        return {d * r / rho, d * z / rho};
    };
    double q1 = quadratic_form(r3, sphere, Region::ball(8.0), phi_r);
    if (std::fabs(q1 + 1.5 * kPi) > 0.02 * 1.5 * kPi) ok = false;
    TestFunction cone;
    cone.value = [](double r, double z) { return std::max(0.0, 2.0 - std::hypot(r, z)); };
    cone.grad = [](double r, double z) -> std::array<double, 2> {
        double rho = std::hypot(r, z);
        if (rho >= 2.0 || rho < 1e-9) return {0.0, 0.0};
        return {-r / rho, -z / rho};
    };
    double q2 = quadratic_form(r3, sphere, Region::ball(8.0), cone);
    if (std::fabs(q2 - 4.0 * kPi / 3.0) > 0.02 * 4.0 * kPi / 3.0) ok = false;
    detail += "Q oracles " + fmt(q1) + ", " + fmt(q2);

    BumpBasis basis = make_lattice_basis(Region::ball(8.0), 0.5, 0.5, 9.5, 9.5);
    int idx = morse_index_estimate(r3, sphere, Region::ball(8.0), basis);
    if (idx < 1) ok = false;
    detail += ", radial index >= " + std::to_string(idx);

    ScalarField2D hp = ReferenceSolution::half_plane(0, 1).sample(
        Grid2D::make(0.05, 4.4, -4.4, 4.4));
    BumpBasis hb = make_lattice_basis(Region::ball(4.0), 0.4, 0.4, 4.4, 4.4);
    int hidx = morse_index_estimate(hp, FbSurface{FlatSurface{0.0}}, Region::ball(4.0), hb);
    if (hidx != 0) ok = false;
    detail += ", half-plane index " + std::to_string(hidx);

    // nested-basis monotonicity
    BumpBasis small;
    small.width = basis.width;
    for (int k = 0; k < basis.size(); k += 2) small.centers.push_back(basis.centers[k]);
    StabilityReport rep_small = lowest_rayleigh(r3, sphere, Region::ball(8.0), small, 3);
    StabilityReport rep_big = lowest_rayleigh(r3, sphere, Region::ball(8.0), basis, 3);
    for (size_t k = 0; k < 3 && k < rep_small.eigenvalues.size(); ++k)
        if (rep_big.eigenvalues[k] > rep_small.eigenvalues[k] + 1e-10) ok = false;

    // outer stability of the solver output
    double cap = std::min({run.full_field.grid.r_max(), run.full_field.grid.z_max()}) - 1.0;
    FbSurface fb = GraphSurface{&run.state.graph};
    std::optional<double> r0 = outer_stability_scan(
        run.full_field, fb, {2.0, 3.0, 4.0, 6.0, 8.0, 10.0}, cap, 1e-3, 0.5, 0.5);
    if (!r0 || *r0 > 10.0) ok = false;
    detail += ", outer R0 " + (r0 ? fmt(*r0) : std::string("none"));
    line(7, "stability oracles, index bounds, outer stability", ok, detail);
}

// --------------------------------------------------------------------------
// criterion 8: determinism of the full pipeline
// --------------------------------------------------------------------------
void criterion_8(const std::string& cli_path) {
    namespace fs = std::filesystem;
    fs::path root = fs::temp_directory_path() / "bl_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    std::string cfg_path = (root / "run.cfg").string();
    atomic_write(cfg_path,
                 "n = 3\nh = 0.05\nr_max = 8\nz_max = 8\nmax_outer = 150\nscales = 4\n");

    bool ok = true;
    std::string detail;
    std::string out1 = (root / "a").string(), out2 = (root / "b").string();
    for (const std::string& out : {out1, out2}) {
        std::string cmd = cli_path + " solve --config " + cfg_path + " --out " + out +
                          " >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        if (WEXITSTATUS(rc) != 0) {
            ok = false;
            detail = "solve exit " + std::to_string(WEXITSTATUS(rc));
        }
    }
    if (ok) {
        for (const char* name :
             {"field.csv", "graph.csv", "state.json", "solve_report.json", "field_full.csv"}) {
            std::string a = read_text_file(out1 + "/" + name);
            std::string b = read_text_file(out2 + "/" + name);
            if (a != b) {
                ok = false;
                detail += std::string(name) + " differs; ";
            }
        }
        for (const std::string& out : {out1, out2}) {
            std::string cmd = cli_path + " diagnose --field " + out + "/field_full.csv" +
                              " --graph " + out + "/graph.csv --state " + out + "/state.json" +
                              " --config " + cfg_path +
                              " --checks weiss,symmetry,barrier --out " + out + "/diag" +
                              " >/dev/null 2>&1";
            std::system(cmd.c_str());
        }
        if (read_text_file(out1 + "/diag/report.json") !=
            read_text_file(out2 + "/diag/report.json")) {
            ok = false;
            detail += "diagnose report differs";
        }
    }
    if (ok && detail.empty()) detail = "byte-identical checkpoints and reports";
    line(8, "identical config gives byte-identical reports", ok, detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");

    criterion_1();
    criterion_3();

    // shared production solve (n = 3, R = 32, h = 0.05)
    ProblemConfig cfg;
    cfg.n = 3;
    cfg.h = 0.05;
    cfg.r_max = 32.0;
    cfg.z_max = 16.0;
    cfg.validate();
    auto t0 = Clock::now();
    SolveResult run = solve_axisymmetric(cfg);
    double solve_seconds = seconds_since(t0);
    std::printf("  (solver: %.1f s, fb residual %.3g, b %.4f, c %.4f)\n", solve_seconds,
                run.state.fb_residual, run.state.b, run.state.c);

    criterion_2(run.full_field, cfg.z_max);
    criterion_4(run, cfg, solve_seconds);
    criterion_5(run, cfg);

    // refinement pair on the smaller box for the curvature stability check
    ProblemConfig small_cfg = cfg;
    small_cfg.r_max = 16.0;
    small_cfg.z_max = 8.0;
    SolveResult coarse = solve_axisymmetric(small_cfg);
    ProblemConfig fine_cfg = small_cfg;
    fine_cfg.h = 0.025;
    SolveResult fine = solve_axisymmetric(fine_cfg);
    criterion_6(run, cfg, coarse, fine, small_cfg);

    criterion_7(run, cfg);
    criterion_8(BERNOULLI_CLI_PATH);

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
