#include "bernoulli/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "bernoulli/errors.hpp"
#include "bernoulli/parallel.hpp"

namespace bernoulli {

double rotation_measure(int n) {
    switch (n) {
        case 3: return 2.0 * M_PI;
        case 4: return 4.0 * M_PI;
        case 5: return 2.0 * M_PI * M_PI;
        case 6: return 8.0 * M_PI * M_PI / 3.0;
    }
    throw Error("rotation_measure: n out of range");
}

namespace {
constexpr int kSub = 4;
}

double ball_fraction(double r0, double z0, double h, double R) {
    if (R <= 0.0) return 0.0;
    double dr = (r0 <= 0.0 && 0.0 <= r0 + h) ? 0.0 : std::min(std::fabs(r0), std::fabs(r0 + h));
    double dz = (z0 <= 0.0 && 0.0 <= z0 + h) ? 0.0 : std::min(std::fabs(z0), std::fabs(z0 + h));
    if (std::hypot(dr, dz) >= R) return 0.0;
    double dmax = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) dmax = std::max(dmax, std::hypot(r0 + a * h, z0 + b * h));
    if (dmax <= R) return 1.0;
    int in = 0;
    for (int a = 0; a < kSub; ++a)
        for (int b = 0; b < kSub; ++b)
            if (std::hypot(r0 + (a + 0.5) * h / kSub, z0 + (b + 0.5) * h / kSub) <= R) ++in;
    return double(in) / (kSub * kSub);
}

std::array<double, 4> signed_cell_corners(const ScalarField2D& f, int i, int j) {
    const Grid2D& g = f.grid;
    auto corner = [&](int ci, int cj) {
        if (f.is_active(ci, cj)) return f.value(ci, cj);
        double best = -g.h;
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            int ni = ci + di[d], nj = cj + dj[d];
            if (ni < 0 || ni >= g.nr || nj < 0 || nj >= g.nz) continue;
            if (f.is_active(ni, nj)) best = std::max(best, f.value(ni, nj) - g.h);
        }
        return std::min(best, 0.0);
    };
    return {corner(i, j), corner(i + 1, j), corner(i, j + 1), corner(i + 1, j + 1)};
}

double positive_fraction(const std::array<double, 4>& c) {
    bool a0 = c[0] > 0, a1 = c[1] > 0, a2 = c[2] > 0, a3 = c[3] > 0;
    if (a0 && a1 && a2 && a3) return 1.0;
    if (!a0 && !a1 && !a2 && !a3) return 0.0;
    int in = 0;
    for (int a = 0; a < kSub; ++a)
        for (int b = 0; b < kSub; ++b) {
            double x = (a + 0.5) / kSub, y = (b + 0.5) / kSub;
            double v = (1 - x) * (1 - y) * c[0] + x * (1 - y) * c[1] + (1 - x) * y * c[2] +
                       x * y * c[3];
            if (v > 0) ++in;
        }
    return double(in) / (kSub * kSub);
}

std::vector<double> active_region_cell_weights(const ScalarField2D& f, double r_inner,
                                               double r_outer) {
    const Grid2D& g = f.grid;
    const int n = f.dim_n;
    std::vector<double> w(std::size_t(g.nr - 1) * (g.nz - 1), 0.0);
    par::run(g.nz - 1, [&](std::int64_t j) {
        for (int i = 0; i < g.nr - 1; ++i) {
            double fr = ball_fraction(g.r(i), g.z(int(j)), g.h, r_outer) -
                        ball_fraction(g.r(i), g.z(int(j)), g.h, r_inner);
            if (fr <= 0.0) continue;
            double fa = positive_fraction(signed_cell_corners(f, i, int(j)));
            if (fa <= 0.0) continue;
            double rl = g.r(i), rh = rl + g.h;
            double wt = rotation_measure(n) * g.h *
                        (std::pow(rh, n - 1) - std::pow(rl, n - 1)) / (n - 1);
            w[std::size_t(j) * (g.nr - 1) + i] = fa * fr * wt;
        }
    });
    return w;
}

namespace {

double energy_cell(const ScalarField2D& f, int i, int j, double r_inner, double r_outer) {
    const Grid2D& g = f.grid;
    const double h = g.h;
    double fr = ball_fraction(g.r(i), g.z(j), h, r_outer) -
                ball_fraction(g.r(i), g.z(j), h, r_inner);
    if (fr <= 0.0) return 0.0;
    double fa = positive_fraction(signed_cell_corners(f, i, j));
    if (fa <= 0.0) return 0.0;
    double u00 = f.value(i, j), u10 = f.value(i + 1, j);
    double u01 = f.value(i, j + 1), u11 = f.value(i + 1, j + 1);
    double ur = ((u10 + u11) - (u00 + u01)) / (2 * h);
    double uz = ((u01 + u11) - (u00 + u10)) / (2 * h);
    int n = f.dim_n;
    double rl = g.r(i), rh = rl + h;
    double weight = rotation_measure(n) * h * (std::pow(rh, n - 1) - std::pow(rl, n - 1)) / (n - 1);
    return (ur * ur + uz * uz + 1.0) * fa * fr * weight;
}

}  // namespace

void energy_cell_contributions_serial(const ScalarField2D& f, double r_inner, double r_outer,
                                      std::vector<double>& out) {
    const Grid2D& g = f.grid;
    out.assign(std::size_t(g.nr - 1) * (g.nz - 1), 0.0);
    for (int j = 0; j < g.nz - 1; ++j)
        for (int i = 0; i < g.nr - 1; ++i)
            out[std::size_t(j) * (g.nr - 1) + i] = energy_cell(f, i, j, r_inner, r_outer);
}

void energy_cell_contributions_omp(const ScalarField2D& f, double r_inner, double r_outer,
                                   std::vector<double>& out) {
    const Grid2D& g = f.grid;
    out.assign(std::size_t(g.nr - 1) * (g.nz - 1), 0.0);
    par::run(g.nz - 1, [&](std::int64_t j) {
        for (int i = 0; i < g.nr - 1; ++i)
            out[std::size_t(j) * (g.nr - 1) + i] = energy_cell(f, i, int(j), r_inner, r_outer);
    });
}

}  // namespace bernoulli
