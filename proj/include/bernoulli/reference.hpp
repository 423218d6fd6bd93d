#pragma once

#include <array>
#include <vector>

#include "bernoulli/field.hpp"

namespace bernoulli {

// Normalized approximating profile x_n + b_hat + c_hat |x|^{2-n} + d_hat'.x' |x|^{-n},
// coefficients bounded by kappa. The horizontal dipole d_hat' is stored along e_1.
struct Ansatz {
    double b_hat = 0.0;
    double c_hat = 0.0;
    double d_hat1 = 0.0;
    double kappa = 0.125;

    bool within_bound() const;
};

enum class RefKind { HalfPlane, Wedge, Radial, AnsatzProfile, TildeV };

// Closed-form solutions and far-field profiles used as oracles.
// Directions live in the meridian (e_1, e_n) plane; evaluation points are
// meridian coordinates (xi, zeta) with xi the signed first horizontal axis.
struct ReferenceSolution {
    RefKind kind = RefKind::Radial;
    int n = 3;
    double e_xi = 0.0, e_zeta = 1.0;  // unit direction for HalfPlane/Wedge/AnsatzProfile
    double b = 0.0, c = 0.0;          // general-scale profile shifts
    double d1 = 0.0, dn = 0.0;        // dipole components (along e_1 and e_n)

    static ReferenceSolution half_plane(double e_xi, double e_zeta);
    static ReferenceSolution wedge(double e_xi, double e_zeta);
    static ReferenceSolution radial(int n);
    static ReferenceSolution ansatz_profile(int n, double b, double c, double d1, double dn);
    static ReferenceSolution tilde_v(int n, double b, double c);

    struct Eval {
        double value;
        double grad_xi, grad_zeta;
    };

    // Raw profile value and analytic gradient. Solution kinds clamp the value
    // at zero (their gradient is the active-side limit on the free boundary).
    // Throws PoleError at the origin for kinds with a pole.
    Eval eval(double xi, double zeta) const;

    // Nodal sampling of max(value, 0); requires an axisymmetric kind.
    ScalarField2D sample(const Grid2D& g) const;

    bool axisymmetric() const;
};

struct GradientBoundCheck {
    double max_deviation;  // max | |grad v|^2 - 1 | over sampled {|v| < kappa}
    double ratio;          // max_deviation / kappa^2
    long samples;          // points that landed in the slab
};

// Samples {|v_hat| < kappa} inside B_4 \ B_{1/4} on a deterministic lattice
// (the vertical coordinate is solved per column so thin slabs are never
// missed) and maximizes | |grad v_hat|^2 - 1 |. Throws EmptyRegion when the
// slab misses every sample point.
GradientBoundCheck ansatz_gradient_bound_check(const Ansatz& a, int n, double kappa,
                                               int lattice = 400);

}  // namespace bernoulli
