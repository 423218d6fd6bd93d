#pragma once

#include <array>
#include <vector>

#include "bernoulli/field.hpp"

namespace bernoulli {

// Surface measure of the unit sphere S^{n-2} (the rotational fiber of the
// meridian reduction), n = 3..6.
double rotation_measure(int n);

// Fraction of the cell with corner (r0, z0) lying inside the ball of radius R
// (3-d radius); exact for fully inside/outside cells, subsampled otherwise.
double ball_fraction(double r0, double z0, double h, double R);

// Corner values for the positive-fraction test. Active corners keep u; a
// corner inside the zero set gets the slope-1 extrapolation max(u_nb) - h
// from its active edge neighbors, which places the interpolated free boundary
// at distance u from the active node as the gradient condition dictates.
std::array<double, 4> signed_cell_corners(const ScalarField2D& f, int i, int j);

double positive_fraction(const std::array<double, 4>& corners);

// Rotational-measure weights of the active part of [r_inner, r_outer] per
// cell, row-major over (nr-1) x (nz-1).
std::vector<double> active_region_cell_weights(const ScalarField2D& f, double r_inner,
                                               double r_outer);

// Per-cell contributions of the bulk energy density (|grad u|^2 + 1_{u>0})
// against the rotational weight, restricted to [r_inner, r_outer] in 3-d
// radius. Serial reference and OpenMP variant fill identical arrays; sums are
// taken in index order by the caller.
void energy_cell_contributions_serial(const ScalarField2D& f, double r_inner, double r_outer,
                                      std::vector<double>& out);
void energy_cell_contributions_omp(const ScalarField2D& f, double r_inner, double r_outer,
                                   std::vector<double>& out);

}  // namespace bernoulli
