#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bernoulli/errors.hpp"
#include "bernoulli/reference.hpp"
#include "bernoulli/symmetry.hpp"

using namespace bernoulli;

namespace {
ExtendedField wrap(const ScalarField2D& f) {
    return ExtendedField{&f, std::nullopt, ExtendedField::Mode::EvenMirror};
}
}  // namespace

TEST_CASE("vertical deficit: even fields vanish at t = 0") {
    ScalarField2D w = ReferenceSolution::wedge(0, 1).sample(Grid2D::make(0.05, 4.2, -4.2, 4.2));
    CHECK(reflection_deficit_vertical(wrap(w), 0.0) == doctest::Approx(0.0));

    ScalarField2D r3 = ReferenceSolution::radial(3).sample(Grid2D::make(0.05, 4.2, -4.2, 4.2));
    CHECK(reflection_deficit_vertical(wrap(r3), 0.0) == doctest::Approx(0.0));
    // monotone above the FB: all t >= 0 nonnegative on the radial solution
    for (double t : {0.5, 1.0, 1.5})
        CHECK(reflection_deficit_vertical(wrap(r3), t) >= -1e-12);
}

TEST_CASE("vertical deficit: half plane at t = 1 touches zero") {
    ScalarField2D hp = ReferenceSolution::half_plane(0, 1).sample(
        Grid2D::make(0.05, 4.2, -4.2, 4.2));
    double d = reflection_deficit_vertical(wrap(hp), 1.0);
    CHECK(d == doctest::Approx(0.0));
    CHECK(reflection_deficit_vertical(wrap(hp), 0.5) >= -1e-12);
}

TEST_CASE("vertical deficit: translated field detected at t = delta/2") {
    const double delta = 0.4, h = 0.05;
    ScalarField2D shifted = sample_meridian(Grid2D::make(h, 4.2, -4.2, 4.2), 3,
                                            [&](double r, double z) {
                                                double rho = std::hypot(r, z - delta);
                                                return rho > 1.0
                                                           ? (1.0 - 1.0 / rho)
                                                           : 0.0;
                                            });
    double d = reflection_deficit_vertical(wrap(shifted), delta / 2.0);
    CHECK(d <= -(delta / 2.0 - 2.0 * h));
}

TEST_CASE("horizontal deficit: axisymmetric fields vanish at t = 0") {
    ScalarField2D r3 = ReferenceSolution::radial(3).sample(Grid2D::make(0.05, 4.2, -4.2, 4.2));
    CHECK(reflection_deficit_horizontal(wrap(r3), 0.0) == doctest::Approx(0.0));
    // radially decreasing: reflected radii are smaller, values larger
    for (double t : {0.5, 1.0})
        CHECK(reflection_deficit_horizontal(wrap(r3), t) >= -1e-12);
}

TEST_CASE("horizontal deficit obeys the reversed inequality on increasing profiles") {
    // u growing in |x'| violates u <= u_t composed with the reflection
    ScalarField2D grow = sample_meridian(Grid2D::make(0.05, 4.2, -4.2, 4.2), 3,
                                         [](double r, double) { return 0.1 + 0.5 * r; });
    CHECK(reflection_deficit_horizontal(wrap(grow), 1.0) < -0.01);
}

TEST_CASE("off-center 3-d field detected by the lattice scan") {
    auto u3 = [](double x1, double x2, double x3) {
        double rho = std::sqrt((x1 - 0.25) * (x1 - 0.25) + x2 * x2 + x3 * x3);
        return rho > 1.0 ? 1.0 - 1.0 / rho : 0.0;
    };
    double d = reflection_deficit_horizontal_fn3(u3, 0.0, 4.0, 0.1);
    CHECK(d < -0.01);

    auto centered = [](double x1, double x2, double x3) {
        double rho = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
        return rho > 1.0 ? 1.0 - 1.0 / rho : 0.0;
    };
    CHECK(reflection_deficit_horizontal_fn3(centered, 0.0, 4.0, 0.1) >= -1e-12);
}

TEST_CASE("involution: node-aligned reflections compose to the identity") {
    ScalarField2D r3 = ReferenceSolution::radial(3).sample(Grid2D::make(0.05, 4.2, -4.2, 4.2));
    const Grid2D& g = r3.grid;
    double t = 0.5;  // node-aligned
    double worst = 0.0;
    for (int j = 0; j < g.nz; ++j) {
        double z = g.z(j);
        double zr = 2 * t - (2 * t - z);
        worst = std::max(worst, std::fabs(zr - z));
    }
    CHECK(worst == 0.0);
}

TEST_CASE("gradient sign check on closed forms") {
    ScalarField2D hp = ReferenceSolution::half_plane(0, 1).sample(
        Grid2D::make(0.05, 4.2, -4.2, 4.2));
    GradientSignCheck gs = gradient_sign_check(hp, 2.0);
    CHECK(gs.min_dz == doctest::Approx(1.0));
    CHECK(gs.max_dr == doctest::Approx(0.0));
    CHECK(gs.far_min_dz == doctest::Approx(1.0));

    ScalarField2D r3 = ReferenceSolution::radial(3).sample(Grid2D::make(0.05, 9.5, -9.5, 9.5));
    GradientSignCheck gr = gradient_sign_check(r3, 8.0);
    CHECK(gr.max_dr > 0.5);  // radially increasing: the radial kind is not graphical
}

TEST_CASE("barrier check oracles") {
    ScalarField2D w = ReferenceSolution::wedge(0, 1).sample(Grid2D::make(0.05, 4.2, -4.2, 4.2));
    BarrierCheck bw = barrier_check(w, 0.0);
    CHECK(bw.min_all == doctest::Approx(0.0));
    CHECK(bw.min_active == doctest::Approx(0.0));

    ScalarField2D r3 = ReferenceSolution::radial(3).sample(Grid2D::make(0.05, 4.2, -4.2, 4.2));
    BarrierCheck br = barrier_check(r3, 1.0);
    CHECK(br.min_all >= 0.0);
}
