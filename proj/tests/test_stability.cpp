#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bernoulli/errors.hpp"
#include "bernoulli/reference.hpp"
#include "bernoulli/stability.hpp"

using namespace bernoulli;

namespace {
const double kPi = M_PI;

ScalarField2D radial3(double h, double extent) {
    return ReferenceSolution::radial(3).sample(Grid2D::make(h, extent, -extent, extent));
}
}  // namespace

TEST_CASE("mean curvature sign anchor: unit sphere carries n - 1 exactly") {
    CHECK(fb_mean_curvature(FbSurface{SphereSurface{1.0}}, 3, 1.0) == 2.0);
    CHECK(fb_mean_curvature(FbSurface{SphereSurface{1.0}}, 5, 1.0) == 4.0);
    CHECK(fb_mean_curvature(FbSurface{SphereSurface{2.0}}, 3, 1.0) == doctest::Approx(1.0));
    CHECK(fb_mean_curvature(FbSurface{FlatSurface{0.5}}, 3, 1.0) == 0.0);
}

TEST_CASE("graph curvature formula on a sphere-like cap") {
    // z = g(r) tracing the unit circle near its pole has H = n - 1
    FreeBoundaryGraph g;
    g.r_tip = 0.0;
    g.h = 1e-3;
    g.g.resize(501);
    for (int i = 0; i < g.size(); ++i) g.g[i] = std::sqrt(1.0 - g.r(i) * g.r(i));
    // active region above the cap <=> zero set below: same orientation as the
    // radial solution near the top of its zero ball
    double H = fb_mean_curvature(g, 3, 0.25);
    CHECK(H == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(fb_mean_curvature(g, 4, 0.25) == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("quadratic form oracles on the radial solution") {
    ScalarField2D f = radial3(0.05, 9.5);
    FbSurface sphere = SphereSurface{1.0};

    TestFunction phi_r;  // (1/|x| - 1/4)_+
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
    double q1 = quadratic_form(f, sphere, Region::ball(8.0), phi_r);
    CHECK(q1 == doctest::Approx(-1.5 * kPi).epsilon(0.02));

    TestFunction cone;  // (2 - |x|)_+
    cone.value = [](double r, double z) { return std::max(0.0, 2.0 - std::hypot(r, z)); };
    cone.grad = [](double r, double z) -> std::array<double, 2> {
        double rho = std::hypot(r, z);
        if (rho >= 2.0 || rho < 1e-9) return {0.0, 0.0};
        return {-r / rho, -z / rho};
    };
    double q2 = quadratic_form(f, sphere, Region::ball(8.0), cone);
    CHECK(q2 == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.02));
}

TEST_CASE("support violation is detected") {
    ScalarField2D f = radial3(0.05, 4.2);
    TestFunction one;
    one.value = [](double, double) { return 1.0; };
    one.grad = [](double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
    CHECK_THROWS_AS(quadratic_form(f, FbSurface{SphereSurface{1.0}}, Region::ball(4.0), one),
                    SupportViolation);
}

TEST_CASE("half plane: dirichlet form, index zero") {
    ScalarField2D hp = ReferenceSolution::half_plane(0, 1).sample(
        Grid2D::make(0.05, 4.4, -4.4, 4.4));
    FbSurface flat = FlatSurface{0.0};
    Region region = Region::ball(4.0);
    BumpBasis basis = make_lattice_basis(region, 0.4, 0.4, 4.4, 4.4);
    REQUIRE(basis.size() > 20);
    StabilityReport rep = lowest_rayleigh(hp, flat, region, basis, 5);
    for (double ev : rep.eigenvalues) CHECK(ev >= -1e-10);
    CHECK(morse_index_estimate(hp, flat, region, basis) == 0);
}

TEST_CASE("radial solution: negative direction found in B_8") {
    ScalarField2D f = radial3(0.05, 9.5);
    FbSurface sphere = SphereSurface{1.0};
    Region region = Region::ball(8.0);
    BumpBasis basis = make_lattice_basis(region, 0.5, 0.5, 9.5, 9.5);
    REQUIRE(basis.size() >= 50);
    StabilityReport rep = lowest_rayleigh(f, sphere, region, basis, 3);
    CHECK(rep.eigenvalues.front() < 0.0);
    CHECK(morse_index_estimate(f, sphere, region, basis) >= 1);
    CHECK(rep.basis_size <= basis.size());
}

TEST_CASE("radial solution: stable away from the free boundary") {
    ScalarField2D f = radial3(0.05, 9.5);
    FbSurface sphere = SphereSurface{1.0};
    Region region = Region::annulus(2.0, 8.0);
    BumpBasis basis = make_lattice_basis(region, 0.5, 0.5, 9.5, 9.5);
    StabilityReport rep = lowest_rayleigh(f, sphere, region, basis, 1);
    CHECK(rep.eigenvalues.front() >= -1e-10);

    std::optional<double> r0 = outer_stability_scan(f, sphere, {1.5, 2.0}, 8.0, 1e-3, 0.5, 0.5);
    REQUIRE(r0.has_value());
    CHECK(*r0 == doctest::Approx(1.5));
}

TEST_CASE("matrices are symmetric and eigenvalues respect basis nesting") {
    ScalarField2D f = radial3(0.05, 9.5);
    FbSurface sphere = SphereSurface{1.0};
    Region region = Region::ball(6.0);
    BumpBasis big = make_lattice_basis(region, 0.5, 0.5, 9.5, 9.5);
    StabilityMatrices mats = assemble_stability(f, sphere, region, big);
    double asym = 0.0;
    for (int i = 0; i < mats.Q.n; ++i)
        for (int j = 0; j < mats.Q.n; ++j)
            asym = std::max(asym, std::fabs(mats.Q.at(i, j) - mats.Q.at(j, i)));
    CHECK(asym <= 1e-12);

    // nested subset of the same centers: its lowest eigenvalues cannot sit
    // below the full basis's (variational min-max)
    BumpBasis small;
    small.width = big.width;
    for (int k = 0; k < big.size(); k += 2) small.centers.push_back(big.centers[k]);
    StabilityReport rep_small = lowest_rayleigh(f, sphere, region, small, 3);
    StabilityReport rep_big = lowest_rayleigh(f, sphere, region, big, 3);
    for (size_t k = 0; k < rep_small.eigenvalues.size() && k < rep_big.eigenvalues.size(); ++k)
        CHECK(rep_big.eigenvalues[k] <= rep_small.eigenvalues[k] + 1e-10);
}

TEST_CASE("degenerate mass matrix is reported") {
    ScalarField2D f = radial3(0.05, 4.2);
    // a basis whose every bump sits inside the zero ball has no active mass
    BumpBasis dead;
    dead.width = 0.1;
    dead.centers = {{0.0, 0.0}, {0.2, 0.0}};
    CHECK_THROWS_AS(
        assemble_stability(f, FbSurface{SphereSurface{1.0}}, Region::ball(4.0), dead),
        SingularMass);
}

TEST_CASE("generalized eigensolver sanity") {
    SymMatrix A(2), B(2);
    A.at(0, 0) = 2.0;
    A.at(1, 1) = 5.0;
    B.at(0, 0) = 1.0;
    B.at(1, 1) = 1.0;
    EigenResult res = generalized_eigen(A, B, true);
    CHECK(res.values[0] == doctest::Approx(2.0));
    CHECK(res.values[1] == doctest::Approx(5.0));
    SymMatrix S(2);
    CHECK_THROWS_AS(generalized_eigen(A, S), SingularMass);
}
