#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bernoulli/energy.hpp"
#include "bernoulli/errors.hpp"
#include "bernoulli/reference.hpp"

using namespace bernoulli;

namespace {
const double kPi = M_PI;

ScalarField2D sampled(const ReferenceSolution& ref, double h, double extent) {
    return ref.sample(Grid2D::make(h, extent, -extent, extent));
}
}  // namespace

TEST_CASE("alt-caffarelli energy oracles") {
    ScalarField2D hp = sampled(ReferenceSolution::half_plane(0, 1), 0.02, 4.4);
    // integrand is identically 2 on the active half ball
    CHECK(ac_energy(hp, Region::ball(1.0)) == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.005));

    ScalarField2D zero(Grid2D::make(0.1, 8.4, -8.4, 8.4), 3);
    zero.refresh_mask();
    CHECK(ac_energy(zero, Region::ball(4.0)) == 0.0);

    ScalarField2D r3 = sampled(ReferenceSolution::radial(3), 0.05, 4.2);
    CHECK(ac_energy(r3, Region::ball(0.5)) == 0.0);

    CHECK_THROWS_AS(ac_energy(r3, Region::ball(100.0)), RegionOutOfDomain);
}

TEST_CASE("energy additivity over disjoint regions is exact") {
    ScalarField2D r3 = sampled(ReferenceSolution::radial(3), 0.05, 4.2);
    double whole = ac_energy(r3, Region::ball(4.0));
    double inner = ac_energy(r3, Region::ball(1.7));
    double ring = ac_energy(r3, Region::annulus(1.7, 4.0));
    CHECK(whole == doctest::Approx(inner + ring).epsilon(1e-14));
}

TEST_CASE("weiss oracles: half-plane, wedge, radial") {
    ScalarField2D hp = sampled(ReferenceSolution::half_plane(0, 1), 0.02, 4.4);
    for (double r : {0.5, 1.0, 2.0})
        CHECK(weiss(hp, r) == doctest::Approx(2.0 * kPi / 3.0).epsilon(0.005));

    ScalarField2D w = sampled(ReferenceSolution::wedge(0, 1), 0.02, 4.4);
    CHECK(weiss(w, 1.0) == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.005));

    ScalarField2D r3 = sampled(ReferenceSolution::radial(3), 0.05, 4.2);
    CHECK(weiss(r3, 0.5) == 0.0);
}

TEST_CASE("weiss scan: radial monotone toward the full-ball density") {
    ScalarField2D r3 = sampled(ReferenceSolution::radial(3), 0.1, 34.0);
    WeissScan scan = weiss_scan(r3, {0.5, 2.0, 8.0, 32.0}, 1e-3);
    CHECK(scan.violations.empty());
    CHECK(scan.values[0] == 0.0);
    for (size_t k = 0; k + 1 < scan.values.size(); ++k)
        CHECK(scan.values[k + 1] >= scan.values[k] - 1e-3);
    CHECK(scan.values.back() == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.05));
}

TEST_CASE("weiss scan rejects unsorted radii") {
    ScalarField2D r3 = sampled(ReferenceSolution::radial(3), 0.1, 8.4);
    CHECK_THROWS_AS(weiss_scan(r3, {2.0, 1.0}, 1e-3), GeometryError);
}

TEST_CASE("total mean curvature of spheres: value and scale invariance") {
    for (double rho : {0.5, 1.0, 2.0}) {
        double tmc = total_mean_curvature(FbSurface{SphereSurface{rho}}, 3,
                                          Region::ball(10.0 * rho));
        CHECK(tmc == doctest::Approx(16.0 * kPi).epsilon(0.01));
    }
}

TEST_CASE("total mean curvature: flat graph vanishes") {
    FreeBoundaryGraph flat;
    flat.r_tip = 1.0;
    flat.h = 0.05;
    flat.g.assign(200, 0.0);
    for (auto& v : flat.g) v = 0.7;
    flat.g[0] = 0.7;  // constant graph, H = 0 pointwise
    CHECK(total_mean_curvature(FbSurface{GraphSurface{&flat}}, 3, Region::ball(20.0)) ==
          doctest::Approx(0.0));
}

TEST_CASE("total mean curvature monotone in the region, exactly") {
    FreeBoundaryGraph g;
    g.r_tip = 1.0;
    g.h = 0.05;
    g.g.resize(300);
    for (int i = 0; i < g.size(); ++i) g.g[i] = 0.5 * (1.0 - 1.0 / g.r(i));
    double small = total_mean_curvature(FbSurface{GraphSurface{&g}}, 3, Region::ball(6.0));
    double large = total_mean_curvature(FbSurface{GraphSurface{&g}}, 3, Region::ball(12.0));
    CHECK(small <= large);
    double ring = total_mean_curvature(FbSurface{GraphSurface{&g}}, 3, Region::annulus(6.0, 12.0));
    CHECK(small + ring == doctest::Approx(large).epsilon(1e-14));
}

TEST_CASE("graph scaling invariance of the total mean curvature") {
    // lambda g(r / lambda) over lambda U matches the original within quadrature
    FreeBoundaryGraph g;
    g.r_tip = 1.0;
    g.h = 0.02;
    g.g.resize(1000);
    for (int i = 0; i < g.size(); ++i) g.g[i] = 0.5 * (1.0 - 1.0 / g.r(i));
    double base = total_mean_curvature(FbSurface{GraphSurface{&g}}, 3, Region::annulus(2.0, 16.0));
    for (double lam : {0.5, 2.0}) {
        FreeBoundaryGraph s;
        s.r_tip = lam * g.r_tip;
        s.h = lam * g.h;
        s.g.resize(g.size());
        for (int i = 0; i < s.size(); ++i) s.g[i] = lam * g.eval(s.r(i) / lam);
        double scaled = total_mean_curvature(FbSurface{GraphSurface{&s}}, 3,
                                             Region::annulus(2.0 * lam, 16.0 * lam));
        CHECK(scaled == doctest::Approx(base).epsilon(0.02));
    }
}
