#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "bernoulli/errors.hpp"
#include "bernoulli/reference.hpp"
#include "bernoulli/solver.hpp"

using namespace bernoulli;

TEST_CASE("radial ODE against the closed form") {
    RadialProfile p3 = solve_radial(3, 100.0, 1e-3);
    CHECK(std::fabs(p3.eval(2.0) - 0.5) <= 1e-8);
    CHECK(p3.u.front() == 0.0);
    CHECK(p3.du.front() == 1.0);
    double worst = 0.0;
    for (double rho = 1.0; rho <= 100.0; rho += 0.37)
        worst = std::max(worst, std::fabs(p3.eval(rho) - (1.0 - 1.0 / rho)));
    CHECK(worst <= 1e-8);

    RadialProfile p5 = solve_radial(5, 200.0, 1e-3);
    CHECK(p5.eval(200.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

    CHECK_THROWS_AS(solve_radial(3, 10.0, 1e-2), StepSizeError);
}

TEST_CASE("mixed solve reproduces linear data exactly") {
    Grid2D box = Grid2D::make(0.1, 8.0, 0.0, 8.0);
    MixedSolveOptions opts;
    opts.tol = 1e-13;
    opts.bottom_dirichlet = true;
    auto data = [](double, double z) { return z + 0.7; };
    ScalarField2D f = solve_laplace_mixed(box, 3, ZeroSet::none(), data, opts);
    double worst = 0.0;
    for (int j = 0; j < box.nz; ++j)
        for (int i = 0; i < box.nr; ++i)
            worst = std::max(worst, std::fabs(f.value(i, j) - (box.z(j) + 0.7)));
    CHECK(worst <= 1e-11);
}

TEST_CASE("discrete maximum principle") {
    Grid2D box = Grid2D::make(0.1, 8.0, 0.0, 8.0);
    auto data = [](double r, double z) { return 0.3 + 0.5 * std::sin(r) * std::sin(r) + 0.1 * z; };
    ScalarField2D f = solve_laplace_mixed(box, 3, ZeroSet::none(), data, {});
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < box.nz; ++j) {
        lo = std::min({lo, f.value(box.nr - 1, j)});
        hi = std::max({hi, f.value(box.nr - 1, j)});
    }
    for (int i = 0; i < box.nr; ++i) {
        lo = std::min(lo, f.value(i, box.nz - 1));
        hi = std::max(hi, f.value(i, box.nz - 1));
    }
    for (double v : f.u) {
        CHECK(v >= lo - 1e-9);
        CHECK(v <= hi + 1e-9);
    }
}

TEST_CASE("mixed solve against the radial closed form on an annulus") {
    // zero set = unit ball, Dirichlet data = exact radial solution
    const double h = 0.01;
    Grid2D box = Grid2D::make(h, 4.2, 0.0, 4.2);
    auto radial = ReferenceSolution::radial(3);
    auto data = [&](double r, double z) { return radial.eval(r, z).value; };
    MixedSolveOptions opts;
    opts.tol = 1e-11;
    ScalarField2D f = solve_laplace_mixed(box, 3, ZeroSet::ball(1.0), data, opts);
    double worst = 0.0;
    for (int j = 0; j < box.nz; ++j)
        for (int i = 0; i < box.nr; ++i) {
            double rho = std::hypot(box.r(i), box.z(j));
            if (rho < 1.0 + 2 * h || rho > 4.0) continue;
            worst = std::max(worst, std::fabs(f.value(i, j) - (1.0 - 1.0 / rho)));
        }
    CHECK(worst <= 1e-5);

    // free-boundary gradient of the trapped solution within 1e-3 of 1
    double fb_worst = 0.0;
    for (double phi = 0.1; phi < M_PI / 2 - 0.1; phi += 0.1) {
        double nx = std::sin(phi), nz = std::cos(phi);
        double mag = probe_gradient(f, nx, nz, nx, nz, 1.5 * h);
        fb_worst = std::max(fb_worst, std::fabs(mag - 1.0));
    }
    CHECK(fb_worst <= 1e-3);
}

TEST_CASE("verify_solution flags a perturbed graph") {
    ProblemConfig cfg;
    cfg.r_max = 8.0;
    cfg.z_max = 8.0;
    cfg.h = 0.05;
    // consistent pair: radial zero ball has no graph; build a subgraph pair instead
    FreeBoundaryGraph g;
    g.r_tip = 1.0;
    g.h = 0.05;
    g.g.resize(static_cast<int>(7.0 / 0.05) + 1);
    for (int i = 0; i < g.size(); ++i) g.g[i] = 0.45 * (1.0 - 1.0 / g.r(i));
    Grid2D quarter = Grid2D::make(0.05, 8.0, 0.0, 8.0);
    auto far = [](double r, double z) {
        double rho = std::hypot(r, z - 0.45);
        return z - 0.45 + 0.3 / rho;
    };
    ScalarField2D qf = solve_laplace_mixed(quarter, 3, ZeroSet::subgraph(&g), far, {});
    ScalarField2D full = mirror_even(qf);

    FreeBoundaryGraph bad = g;
    for (int i = 0; i < bad.size(); ++i) bad.g[i] += 0.1 * std::sin(bad.r(i));
    double run = 0.0;
    for (int i = 0; i < bad.size(); ++i) {  // keep it a valid monotone graph
        run = std::max(run, std::max(0.0, bad.g[i]));
        bad.g[i] = run;
    }
    bad.g[0] = 0.0;
    double good_res = measure_fb_residual(full, g).sup;
    double bad_res = measure_fb_residual(full, bad).sup;
    CHECK(bad_res > 1e-2);
    CHECK(bad_res > good_res);
}

TEST_CASE("geometry guards") {
    FreeBoundaryGraph g;
    g.r_tip = 1.0;
    g.h = 0.1;
    g.g.assign(60, 0.0);
    for (int i = 0; i < g.size(); ++i) g.g[i] = 7.9;  // exits the box
    g.g[0] = 0.0;
    Grid2D quarter = Grid2D::make(0.1, 8.0, 0.0, 8.0);
    CHECK_THROWS_AS(
        build_mixed_stencil(quarter, 3, ZeroSet::subgraph(&g), [](double, double) { return 1.0; }),
        GeometryError);
}

TEST_CASE("coarse end-to-end solve converges and checkpoints bit-exactly") {
    ProblemConfig cfg;
    cfg.n = 3;
    cfg.h = 0.05;
    cfg.r_max = 8.0;
    cfg.z_max = 8.0;
    cfg.max_outer = 500;
    cfg.validate();

    SolveResult result = solve_axisymmetric(cfg);
    CHECK(result.converged);
    CHECK(result.state.fb_residual <= cfg.tol_fb);
    CHECK(result.state.b > 0.0);
    CHECK(result.state.c > 0.0);

    SolutionReport rep = verify_solution(result.full_field, result.state.graph, cfg);
    CHECK(rep.fb_residual <= cfg.tol_fb);
    CHECK(rep.harmonicity_residual <= rep.harmonicity_bound);
    CHECK(rep.max_gradient <= rep.gradient_bound);
    CHECK(rep.graphical);
    CHECK(rep.g_monotone);

    // barrier of the far-field pair
    const Grid2D& gg = result.full_field.grid;
    double barrier = 1e300;
    for (int j = 0; j < gg.nz; ++j)
        for (int i = 0; i < gg.nr; ++i)
            barrier = std::min(barrier, result.full_field.value(i, j) -
                                            (std::fabs(gg.z(j)) - result.state.b));
    CHECK(barrier >= -1e-3);

    // round-trip the checkpoint and make sure the state is bit-identical
    std::string dir = (std::filesystem::temp_directory_path() / "bl_ckpt").string();
    save_checkpoint(result.state, dir);
    SolveState restored = load_checkpoint(dir, cfg);
    CHECK(restored.field.u == result.state.field.u);
    CHECK(restored.graph.g == result.state.graph.g);
    CHECK(restored.b == result.state.b);
    CHECK(restored.c == result.state.c);
    CHECK(restored.tau == result.state.tau);

    // warm-start idempotence: resuming a converged state exits immediately
    SolveResult again = resume_axisymmetric(cfg, restored);
    CHECK(again.converged);
    CHECK(again.state.iteration - restored.iteration <= 5);
    std::filesystem::remove_all(dir);
}
