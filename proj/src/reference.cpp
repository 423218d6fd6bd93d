#include "bernoulli/reference.hpp"

#include <algorithm>
#include <cmath>

#include "bernoulli/errors.hpp"
#include "bernoulli/parallel.hpp"

namespace bernoulli {

bool Ansatz::within_bound() const {
    return std::max({std::fabs(b_hat), std::fabs(c_hat), std::fabs(d_hat1)}) <= kappa + 1e-15;
}

namespace {
void check_unit(double e_xi, double e_zeta) {
    if (std::fabs(std::hypot(e_xi, e_zeta) - 1.0) > 1e-14)
        throw GeometryError("direction must be a unit vector");
}
}  // namespace

ReferenceSolution ReferenceSolution::half_plane(double e_xi, double e_zeta) {
    check_unit(e_xi, e_zeta);
    ReferenceSolution r;
    r.kind = RefKind::HalfPlane;
    r.e_xi = e_xi;
    r.e_zeta = e_zeta;
    return r;
}

ReferenceSolution ReferenceSolution::wedge(double e_xi, double e_zeta) {
    check_unit(e_xi, e_zeta);
    ReferenceSolution r;
    r.kind = RefKind::Wedge;
    r.e_xi = e_xi;
    r.e_zeta = e_zeta;
    return r;
}

ReferenceSolution ReferenceSolution::radial(int n) {
    ReferenceSolution r;
    r.kind = RefKind::Radial;
    r.n = n;
    return r;
}

ReferenceSolution ReferenceSolution::ansatz_profile(int n, double b, double c, double d1,
                                                    double dn) {
    ReferenceSolution r;
    r.kind = RefKind::AnsatzProfile;
    r.n = n;
    r.b = b;
    r.c = c;
    r.d1 = d1;
    r.dn = dn;
    return r;
}

ReferenceSolution ReferenceSolution::tilde_v(int n, double b, double c) {
    ReferenceSolution r;
    r.kind = RefKind::TildeV;
    r.n = n;
    r.b = b;
    r.c = c;
    return r;
}

bool ReferenceSolution::axisymmetric() const {
    switch (kind) {
        case RefKind::Radial:
        case RefKind::TildeV:
            return true;
        case RefKind::HalfPlane:
        case RefKind::Wedge:
            return e_xi == 0.0;
        case RefKind::AnsatzProfile:
            return d1 == 0.0;
    }
    return false;
}

ReferenceSolution::Eval ReferenceSolution::eval(double xi, double zeta) const {
    switch (kind) {
        case RefKind::HalfPlane: {
            double v = e_xi * xi + e_zeta * zeta;
            if (v > 0.0) return {v, e_xi, e_zeta};
            if (v == 0.0) return {0.0, e_xi, e_zeta};
            return {0.0, 0.0, 0.0};
        }
        case RefKind::Wedge: {
            double v = e_xi * xi + e_zeta * zeta;
            double s = v >= 0.0 ? 1.0 : -1.0;
            return {std::fabs(v), s * e_xi, s * e_zeta};
        }
        case RefKind::Radial: {
            double rho = std::hypot(xi, zeta);
            if (rho == 0.0) throw PoleError("radial solution evaluated at the origin");
            if (rho <= 1.0) {
                double mag = rho < 1.0 ? 0.0 : 1.0;
                return {0.0, mag * xi / rho, mag * zeta / rho};
            }
            double v = (1.0 - std::pow(rho, 2.0 - n)) / (n - 2);
            double dv = std::pow(rho, 1.0 - n);
            return {v, dv * xi / rho, dv * zeta / rho};
        }
        case RefKind::AnsatzProfile: {
            double rho = std::hypot(xi, zeta);
            if (rho == 0.0) throw PoleError("ansatz profile evaluated at the origin");
            double rn = std::pow(rho, -double(n));
            double r2n = std::pow(rho, 2.0 - n);
            double dx = d1 * xi + dn * zeta;
            double v = e_xi * xi + e_zeta * zeta - b + c * r2n + dx * rn;
            // grad = e + c(2-n) x |x|^-n + d |x|^-n - n (d.x) x |x|^-n-2
            double gx = e_xi + c * (2.0 - n) * xi * rn + d1 * rn - n * dx * xi * rn / (rho * rho);
            double gz =
                e_zeta + c * (2.0 - n) * zeta * rn + dn * rn - n * dx * zeta * rn / (rho * rho);
            return {v, gx, gz};
        }
        case RefKind::TildeV: {
            double zb = zeta - b;
            double rho = std::hypot(xi, zb);
            if (rho == 0.0) throw PoleError("tilde_v evaluated at its pole");
            double v = zeta - b + c * std::pow(rho, 2.0 - n);
            double dv = c * (2.0 - n) * std::pow(rho, -double(n));
            return {v, dv * xi, 1.0 + dv * zb};
        }
    }
    throw Error("unreachable");
}

ScalarField2D ReferenceSolution::sample(const Grid2D& g) const {
    if (!axisymmetric())
        throw GeometryError("cannot sample a non-axisymmetric reference on a meridian grid");
    return sample_meridian(g, n, [this](double r, double z) {
        if (kind == RefKind::Radial && r == 0.0 && z == 0.0) return 0.0;
        return eval(r, z).value;
    });
}

GradientBoundCheck ansatz_gradient_bound_check(const Ansatz& a, int n, double kappa,
                                               int lattice) {
    if (!a.within_bound()) throw HypothesisViolated("ansatz outside its coefficient bound");
    // Work in (x1, y, z) with y = |(x_2, ..., x_{n-1})|; the profile and its
    // gradient magnitude depend only on these three coordinates.
    auto value = [&](double x1, double y, double z) {
        double rho = std::sqrt(x1 * x1 + y * y + z * z);
        return z + a.b_hat + a.c_hat * std::pow(rho, 2.0 - n) +
               a.d_hat1 * x1 * std::pow(rho, -double(n));
    };
    auto grad_sq = [&](double x1, double y, double z) {
        double rho2 = x1 * x1 + y * y + z * z;
        double rho = std::sqrt(rho2);
        double rn = std::pow(rho, -double(n));
        double dx = a.d_hat1 * x1;
        double g1 = a.c_hat * (2.0 - n) * x1 * rn + a.d_hat1 * rn - n * dx * x1 * rn / rho2;
        double gy = a.c_hat * (2.0 - n) * y * rn - n * dx * y * rn / rho2;
        double gz = 1.0 + a.c_hat * (2.0 - n) * z * rn - n * dx * z * rn / rho2;
        return g1 * g1 + gy * gy + gz * gz;
    };

    const double step = 8.0 / lattice;
    std::vector<double> col_max(std::size_t(lattice + 1) * (lattice / 2 + 1), -1.0);
    std::vector<long> col_cnt(col_max.size(), 0);
    par::run(static_cast<std::int64_t>(col_max.size()), [&](std::int64_t idx) {
        int iy = static_cast<int>(idx % (lattice / 2 + 1));
        int i1 = static_cast<int>(idx / (lattice / 2 + 1));
        double x1 = -4.0 + i1 * step;
        double y = iy * step;
        // solve v(z) = 0 in the vertical column, then probe the |v| < kappa slab
        double z = -a.b_hat;
        for (int it = 0; it < 30; ++it) {
            double rho2 = x1 * x1 + y * y + z * z;
            if (rho2 < 1e-12) break;
            double rho = std::sqrt(rho2);
            double rn = std::pow(rho, -double(n));
            double dv = 1.0 + a.c_hat * (2.0 - n) * z * rn - n * (a.d_hat1 * x1) * z * rn / rho2;
            if (std::fabs(dv) < 0.25) break;
            double step_z = value(x1, y, z) / dv;
            z -= step_z;
            if (std::fabs(step_z) < 1e-14) break;
        }
        double m = -1.0;
        long cnt = 0;
        const int probes = 25;
        for (int k = -probes; k <= probes; ++k) {
            double zz = z + 1.2 * kappa * k / probes;
            double rho = std::sqrt(x1 * x1 + y * y + zz * zz);
            if (rho < 0.25 || rho > 4.0) continue;
            if (std::fabs(value(x1, y, zz)) >= kappa) continue;
            ++cnt;
            m = std::max(m, std::fabs(grad_sq(x1, y, zz) - 1.0));
        }
        col_max[idx] = m;
        col_cnt[idx] = cnt;
    });
    double m = -1.0;
    long total = 0;
    for (std::size_t k = 0; k < col_max.size(); ++k) {
        m = std::max(m, col_max[k]);
        total += col_cnt[k];
    }
    if (total == 0) throw EmptyRegion("slab {|v| < kappa} missed all sample points");
    return {m, m / (kappa * kappa), total};
}

}  // namespace bernoulli
