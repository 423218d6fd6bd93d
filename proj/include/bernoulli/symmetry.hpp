#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bernoulli/annulus.hpp"
#include "bernoulli/field.hpp"

namespace bernoulli {

// Worst violation of  u >= u composed with the vertical reflection across
// {z = t}  over the sampled half-space {z >= t}: min of u(x) - u(r, 2t - z).
// Nonnegative (up to tolerance) for the classified solutions. Off-grid
// reflections interpolate; points below the grid use the far-field extension.
double reflection_deficit_vertical(const ExtendedField& field, double t);

// Horizontal counterpart along e_1 on the 3-d reconstruction; the inequality
// direction reverses: min over {x_1 >= t} of u(sigma_t(x)) - u(x). For each
// meridian radius rho the reflected radii sweep [|rho - 2t|, rho], handled by
// an exact windowed minimum per grid row.
double reflection_deficit_horizontal(const ExtendedField& field, double t);

struct ReflectionScan {
    std::string axis;
    std::vector<double> t;
    std::vector<double> deficit;
    std::optional<double> critical_t;  // first t whose deficit drops below -tol
};

ReflectionScan reflection_scan_vertical(const ExtendedField& field,
                                        const std::vector<double>& ts, double tol);
ReflectionScan reflection_scan_horizontal(const ExtendedField& field,
                                          const std::vector<double>& ts, double tol);

// Lattice scan for synthetic non-axisymmetric inputs (n = 3).
double reflection_deficit_horizontal_fn3(const std::function<double(double, double, double)>& u3,
                                         double t, double extent, double step);

struct GradientSignCheck {
    double min_dz = 0.0;      // min of d_z u over {z > 0} active
    double max_dr = 0.0;      // max of d_r u over {r > 0} active
    double far_min_dz = 0.0;  // min of d_z u over active nodes with |x| >= M
};

GradientSignCheck gradient_sign_check(const ScalarField2D& field, double far_m);

struct BarrierCheck {
    double min_active = 0.0;  // min over active nodes of u - (|z| - b)
    double min_all = 0.0;     // min over all nodes
};

BarrierCheck barrier_check(const ScalarField2D& field, double b);

void write_reflection_csv(const ReflectionScan& scan, const std::string& path);

}  // namespace bernoulli
