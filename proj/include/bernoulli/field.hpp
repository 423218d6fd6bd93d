#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bernoulli {

// Uniform tensor grid in the meridian (r, z) half-plane, r0 = 0.
struct Grid2D {
    int nr = 0, nz = 0;
    double h = 0.0;
    double z0 = 0.0;  // z of row 0; full fields use z0 = -z_max, half fields 0

    double r(int i) const { return i * h; }
    double z(int j) const { return z0 + j * h; }
    double r_max() const { return (nr - 1) * h; }
    double z_min() const { return z0; }
    double z_max() const { return z0 + (nz - 1) * h; }
    std::int64_t size() const { return std::int64_t(nr) * nz; }
    std::int64_t idx(int i, int j) const { return std::int64_t(j) * nr + i; }

    static Grid2D make(double h, double r_extent, double z_lo, double z_hi);
};

// Axisymmetric sampled solution u(r, z) >= 0 with ambient dimension n.
// A node is active iff u > 0 there; the activity mask is derived from values.
class ScalarField2D {
public:
    Grid2D grid;
    int dim_n = 3;
    std::vector<double> u;
    std::vector<std::uint8_t> active;

    ScalarField2D() = default;
    ScalarField2D(const Grid2D& g, int n);

    double value(int i, int j) const { return u[grid.idx(i, j)]; }
    double& value(int i, int j) { return u[grid.idx(i, j)]; }
    bool is_active(int i, int j) const { return active[grid.idx(i, j)] != 0; }

    void refresh_mask();

    // Bilinear interpolation; the field is even in r, so negative radii fold.
    // Throws RegionOutOfDomain outside the grid hull.
    double interp(double r, double z) const;
    bool in_hull(double r, double z) const;

    // Centered differences, one-sided on the boundary rows/columns.
    std::array<double, 2> gradient(int i, int j) const;

    // Max over active nodes of |grad u| (meridian magnitude, equals the 3-d one).
    double max_gradient() const;

    // Discrete Laplacian u_rr + (n-2) u_r / r + u_zz, axis handled by the
    // even-extension limit. Only meaningful at interior nodes.
    double laplacian(int i, int j) const;
};

ScalarField2D sample_meridian(const Grid2D& g, int n,
                              const std::function<double(double, double)>& f);

// Validation per the type contract: u >= 0 and max |grad u| <= 1 + grad_slack.
// Returns human-readable violations; empty means accepted.
std::vector<std::string> validate_field(const ScalarField2D& f, double grad_slack);

// Even mirror of a half field (z in [0, Z]) onto [-Z, Z].
ScalarField2D mirror_even(const ScalarField2D& half);

// One-sided two-point probe of the normal derivative at a free-boundary point
// (pr, pz) along the inward unit normal (nx, nz), assuming u = 0 there:
// (4 u(p + d n) - u(p + 2 d n)) / (2 d), which cancels the quadratic term.
double probe_gradient(const ScalarField2D& f, double pr, double pz, double nx, double nz,
                      double delta);

// Zero out values below z = 0 (resp. above) to isolate one component.
ScalarField2D upper_part(const ScalarField2D& f);

// CSV "r,z,u", rows in row-major z-then-r order, 17 significant digits.
void write_field_csv(const ScalarField2D& f, const std::string& path);
ScalarField2D read_field_csv(const std::string& path, int dim_n);

}  // namespace bernoulli
