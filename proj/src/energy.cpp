#include "bernoulli/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bernoulli/errors.hpp"
#include "bernoulli/io.hpp"
#include "bernoulli/parallel.hpp"
#include "bernoulli/quadrature.hpp"

namespace bernoulli {

namespace {
void check_region_fits(const ScalarField2D& f, double r_outer) {
    const Grid2D& g = f.grid;
    double fit = std::min({g.r_max(), g.z_max(), -g.z_min()});
    if (r_outer > fit + 1e-12) throw RegionOutOfDomain("region radius exceeds the grid");
}
}  // namespace

double ac_energy(const ScalarField2D& field, const Region& region) {
    check_region_fits(field, region.r_outer);
    std::vector<double> contrib;
    energy_cell_contributions_omp(field, region.r_inner, region.r_outer, contrib);
    return par::ordered_sum(contrib);
}

double weiss(const ScalarField2D& field, double r) {
    const Grid2D& g = field.grid;
    if (r > std::min({g.r_max(), g.z_max(), -g.z_min()}) - 2 * g.h + 1e-12)
        throw RegionOutOfDomain("weiss radius too large for the grid");
    int n = field.dim_n;
    double vol = ac_energy(field, Region::ball(r));

    // trace of u^2 on the sphere, trapezoid in the polar angle
    int n_phi = std::max(16, static_cast<int>(std::ceil(M_PI * r / g.h)));
    std::vector<double> contrib(n_phi + 1, 0.0);
    par::run(n_phi + 1, [&](std::int64_t k) {
        double phi = M_PI * k / n_phi;
        double w = (k == 0 || k == n_phi) ? 0.5 : 1.0;
        double uval = field.interp(r * std::sin(phi), r * std::cos(phi));
        contrib[k] = w * uval * uval * std::pow(std::sin(phi), n - 2);
    });
    double sphere = par::ordered_sum(contrib) * (M_PI / n_phi) * rotation_measure(n) *
                    std::pow(r, n - 1);
    return vol / std::pow(r, n) - sphere / std::pow(r, n + 1);
}

WeissScan weiss_scan(const ScalarField2D& field, const std::vector<double>& radii, double tol) {
    for (size_t k = 0; k + 1 < radii.size(); ++k)
        if (radii[k + 1] <= radii[k]) throw GeometryError("weiss_scan radii must increase");
    WeissScan scan;
    scan.radii = radii;
    scan.values.resize(radii.size());
    for (size_t k = 0; k < radii.size(); ++k) scan.values[k] = weiss(field, radii[k]);
    for (size_t k = 0; k + 1 < radii.size(); ++k) {
        double drop = scan.values[k] - scan.values[k + 1];
        if (drop > tol) scan.violations.push_back({radii[k + 1], drop});
    }
    return scan;
}

void write_weiss_csv(const WeissScan& scan, const std::string& path) {
    std::ostringstream out;
    out << "r,W\n";
    for (size_t k = 0; k < scan.radii.size(); ++k)
        out << format_double(scan.radii[k]) << ',' << format_double(scan.values[k]) << '\n';
    atomic_write(path, out.str());
}

double total_mean_curvature(const FbSurface& surface, int n, const Region& region) {
    if (const auto* fs = std::get_if<FlatSurface>(&surface)) {
        (void)fs;
        return 0.0;
    }
    if (const auto* s = std::get_if<SphereSurface>(&surface)) {
        double rho = s->radius;
        if (!region.contains(rho)) return 0.0;
        double H = (n - 1) / rho;
        const int m = 2000;
        std::vector<double> contrib(m + 1, 0.0);
        for (int k = 0; k <= m; ++k) {
            double phi = M_PI * k / m;
            double w = (k == 0 || k == m) ? 0.5 : 1.0;
            contrib[k] = w * std::pow(std::sin(phi), n - 2);
        }
        return par::ordered_sum(contrib) * (M_PI / m) * rotation_measure(n) *
               std::pow(rho, n - 1) * std::pow(std::fabs(H), n - 1);
    }
    const auto& gs = std::get<GraphSurface>(surface);
    const FreeBoundaryGraph& g = *gs.graph;
    if (g.size() < 8) throw DegenerateGraph("graph too short");
    double total = 0.0;
    const int i0 = 5;  // the graph parametrization degenerates at the tip
    for (int i = i0; i < g.size() - 2; ++i) {
        double r = g.r(i);
        double gp = g.deriv(r);
        double q = 1.0 + gp * gp;
        if (!(q < 1e16)) throw DegenerateGraph("graph slope overflow");
        double rho = std::hypot(r, g.g[i]);
        if (!region.contains(rho)) continue;
        double H = fb_mean_curvature(g, n, r);
        // two sheets |z| = g(r)
        total += 2.0 * std::pow(std::fabs(H), n - 1) * rotation_measure(n) *
                 std::pow(r, n - 2) * std::sqrt(q) * g.h;
    }
    return total;
}

}  // namespace bernoulli
