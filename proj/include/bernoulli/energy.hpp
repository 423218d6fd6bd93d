#pragma once

#include <string>
#include <vector>

#include "bernoulli/field.hpp"
#include "bernoulli/surface.hpp"

namespace bernoulli {

// Ball or annulus centered at the origin (in 3-d radius).
struct Region {
    double r_inner = 0.0;
    double r_outer = 0.0;

    static Region ball(double r) { return {0.0, r}; }
    static Region annulus(double r0, double r1) { return {r0, r1}; }
    bool contains(double rho) const { return rho > r_inner && rho <= r_outer; }
};

// Quadrature of |grad u|^2 + 1_{u>0} over the region, with the rotational
// weight |S^{n-2}| r^{n-2}. Cells crossed by the free boundary or the region
// boundary contribute by their subsampled fractions.
double ac_energy(const ScalarField2D& field, const Region& region);

// Scale-normalized boundary-adjusted energy
//   W(r) = r^{-n} int_{B_r} (|grad u|^2 + 1_{u>0}) - r^{-(n+1)} int_{dB_r} u^2.
double weiss(const ScalarField2D& field, double r);

struct WeissScan {
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<std::pair<double, double>> violations;  // (r_i, drop) below -tol
};

WeissScan weiss_scan(const ScalarField2D& field, const std::vector<double>& radii, double tol);

void write_weiss_csv(const WeissScan& scan, const std::string& path);

// Integral of |H|^{n-1} over the rotated surface inside the region.
// Graph surfaces integrate over both sheets from r_tip + 5h_g onward.
double total_mean_curvature(const FbSurface& surface, int n, const Region& region);

}  // namespace bernoulli
