#include "bernoulli/annulus.hpp"

#include <algorithm>
#include <cmath>

#include "bernoulli/errors.hpp"

namespace bernoulli {

AnnulusSample sample_annulus(const ScalarField2D& field, double r) {
    const Grid2D& g = field.grid;
    if (r * 0.5 < 2.0 * g.h)
        throw GeometryError("annulus scale under-resolved: r/2 < 2h");
    const double eps = 1e-12 * std::max(1.0, r);
    if (2.0 * r > g.r_max() + eps || 2.0 * r > g.z_max() + eps || -2.0 * r < g.z_min() - eps)
        throw AnnulusOutOfDomain("B_{2r} exceeds the grid for r = " + std::to_string(r));

    AnnulusSample out;
    out.scale = r;
    const double lo = 0.5 * r - eps, hi = 2.0 * r + eps;
    for (int j = 0; j < g.nz; ++j) {
        double z = g.z(j);
        for (int i = 0; i < g.nr; ++i) {
            double rho = std::hypot(g.r(i), z);
            if (rho < lo || rho > hi) continue;
            double v = field.value(i, j);
            bool act = field.is_active(i, j);
            out.pts.push_back({g.r(i), z, v, act});
            if (i > 0) out.pts.push_back({-g.r(i), z, v, act});
        }
    }
    if (out.pts.empty()) throw EmptyAnnulus("no grid samples in the annulus");
    return out;
}

namespace {
AnnulusSample polar_samples(const std::function<double(double, double)>& u, double r,
                            double step) {
    AnnulusSample out;
    out.scale = r;
    int n_rho = std::max(8, static_cast<int>(std::ceil(1.5 * r / step)));
    for (int k = 0; k <= n_rho; ++k) {
        double rho = 0.5 * r + 1.5 * r * k / n_rho;
        int n_phi = std::max(8, static_cast<int>(std::ceil(M_PI * rho / step)));
        for (int m = 0; m <= n_phi; ++m) {
            double phi = M_PI * m / n_phi;
            double xi = rho * std::sin(phi), zeta = rho * std::cos(phi);
            double v = u(xi, zeta);
            out.pts.push_back({xi, zeta, v, v > 0.0});
            if (xi > 0.0) {
                double vm = u(-xi, zeta);
                out.pts.push_back({-xi, zeta, vm, vm > 0.0});
            }
        }
    }
    return out;
}
}  // namespace

AnnulusSample sample_annulus_fn(const std::function<double(double, double)>& u, double r,
                                double step) {
    AnnulusSample s = polar_samples(u, r, step);
    if (s.pts.empty()) throw EmptyAnnulus("no samples in the annulus");
    return s;
}

double ExtendedField::eval(double xi, double zeta) const {
    if (mode == Mode::UpperOnly && zeta <= 0.0) return 0.0;
    if (field->in_hull(xi, zeta)) return field->interp(xi, zeta);
    if (!far)
        throw RegionOutOfDomain("point outside the grid and no far-field profile attached");
    double z = mode == Mode::EvenMirror ? std::fabs(zeta) : zeta;
    return std::max(0.0, far->eval(std::fabs(xi), z).value);
}

AnnulusSample ExtendedField::sample_annulus(double r, double step) const {
    return sample_annulus_fn([this](double xi, double zeta) { return eval(xi, zeta); }, r, step);
}

}  // namespace bernoulli
