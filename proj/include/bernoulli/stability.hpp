#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bernoulli/eigen.hpp"
#include "bernoulli/energy.hpp"
#include "bernoulli/field.hpp"
#include "bernoulli/surface.hpp"

namespace bernoulli {

// Axisymmetric test function on the closure of the positivity set, with its
// analytic meridian gradient.
struct TestFunction {
    std::function<double(double, double)> value;
    std::function<std::array<double, 2>(double, double)> grad;
};

// Second-variation form  Q(phi, phi) = int |grad phi|^2 - int_FB H phi^2.
// Throws SupportViolation when phi fails to vanish on the region boundary.
double quadratic_form(const ScalarField2D& field, const FbSurface& fb, const Region& region,
                      const TestFunction& phi);

// Tensor C^2 bump basis on a meridian lattice, clipped to the region.
// Bumps straddling the axis are evenly reflected so they stay smooth in 3-d.
struct BumpBasis {
    double width = 0.5;
    std::vector<std::array<double, 2>> centers;

    int size() const { return static_cast<int>(centers.size()); }
    double value(int k, double r, double z) const;
    std::array<double, 2> grad(int k, double r, double z) const;
    std::string id(int k) const;
};

BumpBasis make_lattice_basis(const Region& region, double spacing, double width,
                             double r_cap, double z_cap);

struct StabilityReport {
    std::string region;
    int basis_size = 0;
    std::vector<double> eigenvalues;  // ascending, k lowest
    int negative_count = 0;
    std::vector<std::string> test_ids;
    bool conditional = false;
};

// Q and L^2-mass matrices over the basis span (active cells only; no
// condition on the free boundary). Columns with vanishing mass are dropped.
struct StabilityMatrices {
    SymMatrix Q, M;
    std::vector<int> kept;  // indices into the basis
};

StabilityMatrices assemble_stability(const ScalarField2D& field, const FbSurface& fb,
                                     const Region& region, const BumpBasis& basis);

// k smallest Rayleigh eigenvalues of Q against the mass matrix; variational
// upper bounds for the continuum min-max values.
StabilityReport lowest_rayleigh(const ScalarField2D& field, const FbSurface& fb,
                                const Region& region, const BumpBasis& basis, int k);

// Count of negative eigenvalues; a lower bound for the Morse index (the
// discretization can miss negative directions, never invent them).
int morse_index_estimate(const ScalarField2D& field, const FbSurface& fb, const Region& region,
                         const BumpBasis& basis);

// Smallest R0 in the list with all basis eigenvalues >= -tol on the annulus
// {R0 < |x| < cap}; nullopt when none verifies.
std::optional<double> outer_stability_scan(const ScalarField2D& field, const FbSurface& fb,
                                           const std::vector<double>& r_list, double cap,
                                           double tol, double spacing, double width);

}  // namespace bernoulli
