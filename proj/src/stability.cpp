#include "bernoulli/stability.hpp"

#include <algorithm>
#include <cmath>

#include "bernoulli/errors.hpp"
#include "bernoulli/parallel.hpp"
#include "bernoulli/quadrature.hpp"

namespace bernoulli {

namespace {

// cubic B-spline, support [-2, 2], C^2
double beta3(double t) {
    double a = std::fabs(t);
    if (a >= 2.0) return 0.0;
    if (a >= 1.0) {
        double q = 2.0 - a;
        return q * q * q / 6.0;
    }
    return 2.0 / 3.0 - a * a + a * a * a / 2.0;
}

double beta3_prime(double t) {
    double a = std::fabs(t);
    double s = t >= 0 ? 1.0 : -1.0;
    if (a >= 2.0) return 0.0;
    if (a >= 1.0) {
        double q = 2.0 - a;
        return -s * q * q / 2.0;
    }
    return s * (-2.0 * a + 1.5 * a * a);
}

std::vector<double> cell_weights(const ScalarField2D& f, const Region& region) {
    return active_region_cell_weights(f, region.r_inner, region.r_outer);
}

struct FbNode {
    double r, z, weight;  // weight carries H and the surface measure
};

std::vector<FbNode> fb_quadrature(const FbSurface& fb, int n, const Region& region,
                                  double h_hint) {
    std::vector<FbNode> nodes;
    if (std::holds_alternative<FlatSurface>(fb)) return nodes;  // H = 0
    if (const auto* s = std::get_if<SphereSurface>(&fb)) {
        double rho = s->radius;
        if (!region.contains(rho)) return nodes;
        double H = (n - 1) / rho;
        int m = std::max(32, static_cast<int>(std::ceil(M_PI * rho / h_hint)));
        for (int k = 0; k <= m; ++k) {
            double phi = M_PI * k / m;
            double tw = (k == 0 || k == m) ? 0.5 : 1.0;
            double w = H * rotation_measure(n) * std::pow(rho, n - 1) *
                       std::pow(std::sin(phi), n - 2) * (M_PI / m) * tw;
            nodes.push_back({rho * std::sin(phi), rho * std::cos(phi), w});
        }
        return nodes;
    }
    const FreeBoundaryGraph& gr = *std::get<GraphSurface>(fb).graph;
    for (int i = 2; i < gr.size() - 2; ++i) {
        double r = gr.r(i);
        double H = fb_mean_curvature(gr, n, r);
        double gp = gr.deriv(r);
        double rho = std::hypot(r, gr.g[i]);
        if (!region.contains(rho)) continue;
        double w = H * rotation_measure(n) * std::pow(r, n - 2) *
                   std::sqrt(1.0 + gp * gp) * gr.h;
        nodes.push_back({r, gr.g[i], w});
        nodes.push_back({r, -gr.g[i], w});
    }
    return nodes;
}

void check_region_fits(const ScalarField2D& f, const Region& region) {
    const Grid2D& g = f.grid;
    double fit = std::min({g.r_max(), g.z_max(), -g.z_min()});
    if (region.r_outer > fit + 1e-12) throw RegionOutOfDomain("region exceeds the grid");
}

std::string region_id(const Region& region) {
    if (region.r_inner <= 0.0) return "ball(" + std::to_string(region.r_outer) + ")";
    return "annulus(" + std::to_string(region.r_inner) + "," + std::to_string(region.r_outer) +
           ")";
}

}  // namespace

double quadratic_form(const ScalarField2D& field, const FbSurface& fb, const Region& region,
                      const TestFunction& phi) {
    check_region_fits(field, region);
    const Grid2D& g = field.grid;

    // phi must vanish on the region boundary
    double scale = 0.0;
    const int m = 256;
    for (int k = 0; k <= m; ++k) {
        double a = M_PI * k / m;
        double v = std::fabs(phi.value(region.r_outer * std::sin(a), region.r_outer * std::cos(a)));
        scale = std::max(scale, v);
        if (region.r_inner > 0)
            scale = std::max(scale, std::fabs(phi.value(region.r_inner * std::sin(a),
                                                        region.r_inner * std::cos(a))));
    }
    if (scale > 1e-9)
        throw SupportViolation("test function does not vanish on the region boundary");

    std::vector<double> w = cell_weights(field, region);
    std::vector<double> contrib(w.size(), 0.0);
    par::run(g.nz - 1, [&](std::int64_t j) {
        for (int i = 0; i < g.nr - 1; ++i) {
            std::size_t k = std::size_t(j) * (g.nr - 1) + i;
            if (w[k] == 0.0) continue;
            double rc = g.r(i) + 0.5 * g.h, zc = g.z(int(j)) + 0.5 * g.h;
            auto gr = phi.grad(rc, zc);
            contrib[k] = (gr[0] * gr[0] + gr[1] * gr[1]) * w[k];
        }
    });
    double dirichlet = par::ordered_sum(contrib);

    double fbterm = 0.0;
    for (const FbNode& node : fb_quadrature(fb, field.dim_n, region, g.h)) {
        double v = phi.value(node.r, node.z);
        fbterm += node.weight * v * v;
    }
    return dirichlet - fbterm;
}

double BumpBasis::value(int k, double r, double z) const {
    const auto& c = centers[k];
    double v = beta3((r - c[0]) / width) * beta3((z - c[1]) / width);
    if (c[0] < 2.0 * width)  // even reflection across the axis
        v += beta3((-r - c[0]) / width) * beta3((z - c[1]) / width);
    return v;
}

std::array<double, 2> BumpBasis::grad(int k, double r, double z) const {
    const auto& c = centers[k];
    double bz = beta3((z - c[1]) / width), bzp = beta3_prime((z - c[1]) / width) / width;
    double br = beta3((r - c[0]) / width), brp = beta3_prime((r - c[0]) / width) / width;
    double gr = brp * bz, gz = br * bzp;
    if (c[0] < 2.0 * width) {
        double mr = beta3((-r - c[0]) / width), mrp = -beta3_prime((-r - c[0]) / width) / width;
        gr += mrp * bz;
        gz += mr * bzp;
    }
    return {gr, gz};
}

std::string BumpBasis::id(int k) const {
    return "bump(" + std::to_string(centers[k][0]) + "," + std::to_string(centers[k][1]) + ")";
}

BumpBasis make_lattice_basis(const Region& region, double spacing, double width, double r_cap,
                             double z_cap) {
    BumpBasis basis;
    basis.width = width;
    int imax = static_cast<int>(std::floor(r_cap / spacing));
    int jmax = static_cast<int>(std::floor(z_cap / spacing));
    for (int j = -jmax; j <= jmax; ++j)
        for (int i = 0; i <= imax; ++i) {
            double cr = i * spacing, cz = j * spacing;
            double lo_r = std::max(0.0, cr - 2 * width), hi_r = cr + 2 * width;
            double lo_z = cz - 2 * width, hi_z = cz + 2 * width;
            if (hi_r > r_cap || hi_z > z_cap || lo_z < -z_cap) continue;
            double dmax = 0.0;
            for (double rr : {lo_r, hi_r})
                for (double zz : {lo_z, hi_z}) dmax = std::max(dmax, std::hypot(rr, zz));
            if (dmax > region.r_outer) continue;
            if (region.r_inner > 0.0) {
                double dr = (lo_r <= 0.0) ? 0.0 : lo_r;
                double dz = (lo_z <= 0.0 && 0.0 <= hi_z) ? 0.0 : std::min(std::fabs(lo_z),
                                                                          std::fabs(hi_z));
                if (std::hypot(dr, dz) < region.r_inner) continue;
            }
            basis.centers.push_back({cr, cz});
        }
    return basis;
}

StabilityMatrices assemble_stability(const ScalarField2D& field, const FbSurface& fb,
                                     const Region& region, const BumpBasis& basis) {
    check_region_fits(field, region);
    const Grid2D& g = field.grid;
    const int nb = basis.size();
    std::vector<double> cw = cell_weights(field, region);
    std::vector<FbNode> fbn = fb_quadrature(fb, field.dim_n, region, g.h);

    // cell index windows per bump support
    std::vector<std::array<int, 4>> win(nb);
    for (int k = 0; k < nb; ++k) {
        const auto& c = basis.centers[k];
        int i0 = std::max(0, int(std::floor((0.0) / g.h)));  // reflected bumps reach the axis
        if (c[0] - 2 * basis.width > 0)
            i0 = std::max(0, int(std::floor((c[0] - 2 * basis.width) / g.h)));
        int i1 = std::min(g.nr - 2, int(std::ceil((c[0] + 2 * basis.width) / g.h)));
        int j0 = std::max(0, int(std::floor((c[1] - 2 * basis.width - g.z0) / g.h)));
        int j1 = std::min(g.nz - 2, int(std::ceil((c[1] + 2 * basis.width - g.z0) / g.h)));
        win[k] = {i0, i1, j0, j1};
    }

    SymMatrix Q(nb), M(nb);
    par::run(nb, [&](std::int64_t a) {
        for (int b = int(a); b < nb; ++b) {
            int i0 = std::max(win[a][0], win[b][0]), i1 = std::min(win[a][1], win[b][1]);
            int j0 = std::max(win[a][2], win[b][2]), j1 = std::min(win[a][3], win[b][3]);
            if (i0 > i1 || j0 > j1) continue;
            double q = 0.0, mass = 0.0;
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i) {
                    double w = cw[std::size_t(j) * (g.nr - 1) + i];
                    if (w == 0.0) continue;
                    double rc = g.r(i) + 0.5 * g.h, zc = g.z(j) + 0.5 * g.h;
                    auto ga = basis.grad(int(a), rc, zc);
                    auto gb = basis.grad(b, rc, zc);
                    q += (ga[0] * gb[0] + ga[1] * gb[1]) * w;
                    mass += basis.value(int(a), rc, zc) * basis.value(b, rc, zc) * w;
                }
            for (const FbNode& node : fbn) {
                double va = basis.value(int(a), node.r, node.z);
                if (va == 0.0) continue;
                q -= node.weight * va * basis.value(b, node.r, node.z);
            }
            Q.at(int(a), b) = q;
            Q.at(b, int(a)) = q;
            M.at(int(a), b) = mass;
            M.at(b, int(a)) = mass;
        }
    });

    // drop columns with no mass on the active set
    double max_diag = 0.0;
    for (int k = 0; k < nb; ++k) max_diag = std::max(max_diag, M.at(k, k));
    std::vector<int> kept;
    for (int k = 0; k < nb; ++k)
        if (M.at(k, k) > 1e-10 * std::max(1.0, max_diag)) kept.push_back(k);
    if (kept.empty()) throw SingularMass("no basis function has mass on the active set");

    StabilityMatrices out{SymMatrix(int(kept.size())), SymMatrix(int(kept.size())), kept};
    for (size_t a = 0; a < kept.size(); ++a)
        for (size_t b = 0; b < kept.size(); ++b) {
            out.Q.at(int(a), int(b)) = Q.at(kept[a], kept[b]);
            out.M.at(int(a), int(b)) = M.at(kept[a], kept[b]);
        }
    return out;
}

StabilityReport lowest_rayleigh(const ScalarField2D& field, const FbSurface& fb,
                                const Region& region, const BumpBasis& basis, int k) {
    StabilityMatrices mats = assemble_stability(field, fb, region, basis);
    EigenResult eig = generalized_eigen(mats.Q, mats.M, false);
    StabilityReport rep;
    rep.region = region_id(region);
    rep.basis_size = static_cast<int>(mats.kept.size());
    rep.conditional = field.dim_n > 3;
    int kk = std::min<int>(k, static_cast<int>(eig.values.size()));
    rep.eigenvalues.assign(eig.values.begin(), eig.values.begin() + kk);
    for (double v : eig.values)
        if (v < -1e-8) ++rep.negative_count;
    for (int idx : mats.kept) rep.test_ids.push_back(basis.id(idx));
    return rep;
}

int morse_index_estimate(const ScalarField2D& field, const FbSurface& fb, const Region& region,
                         const BumpBasis& basis) {
    return lowest_rayleigh(field, fb, region, basis, basis.size()).negative_count;
}

std::optional<double> outer_stability_scan(const ScalarField2D& field, const FbSurface& fb,
                                           const std::vector<double>& r_list, double cap,
                                           double tol, double spacing, double width) {
    for (double r0 : r_list) {
        if (r0 >= cap) continue;
        Region region = Region::annulus(r0, cap);
        BumpBasis basis = make_lattice_basis(region, spacing, width, field.grid.r_max(),
                                             std::min(field.grid.z_max(), -field.grid.z_min()));
        if (basis.size() == 0) return r0;  // nothing representable, trivially stable
        StabilityReport rep = lowest_rayleigh(field, fb, region, basis, 1);
        if (rep.eigenvalues.empty() || rep.eigenvalues.front() >= -tol) return r0;
    }
    return std::nullopt;
}

}  // namespace bernoulli
