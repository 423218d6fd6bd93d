#include "bernoulli/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bernoulli/errors.hpp"
#include "bernoulli/io.hpp"
#include "bernoulli/parallel.hpp"

namespace bernoulli {

Grid2D Grid2D::make(double h, double r_extent, double z_lo, double z_hi) {
    Grid2D g;
    g.h = h;
    g.z0 = z_lo;
    g.nr = static_cast<int>(std::round(r_extent / h)) + 1;
    g.nz = static_cast<int>(std::round((z_hi - z_lo) / h)) + 1;
    return g;
}

ScalarField2D::ScalarField2D(const Grid2D& g, int n)
    : grid(g), dim_n(n), u(g.size(), 0.0), active(g.size(), 0) {}

void ScalarField2D::refresh_mask() {
    active.assign(u.size(), 0);
    par::run(static_cast<std::int64_t>(u.size()),
             [&](std::int64_t k) { active[k] = u[k] > 0.0 ? 1 : 0; });
}

bool ScalarField2D::in_hull(double r, double z) const {
    r = std::fabs(r);
    const double eps = 1e-12 * grid.h;
    return r <= grid.r_max() + eps && z >= grid.z_min() - eps && z <= grid.z_max() + eps;
}

double ScalarField2D::interp(double r, double z) const {
    r = std::fabs(r);
    if (!in_hull(r, z))
        throw RegionOutOfDomain("interp at (" + std::to_string(r) + ", " + std::to_string(z) + ")");
    double fi = std::min(r / grid.h, double(grid.nr - 1));
    double fj = std::min((z - grid.z0) / grid.h, double(grid.nz - 1));
    int i = std::min(grid.nr - 2, std::max(0, int(fi)));
    int j = std::min(grid.nz - 2, std::max(0, int(fj)));
    double a = fi - i, b = fj - j;
    return (1 - a) * (1 - b) * value(i, j) + a * (1 - b) * value(i + 1, j) +
           (1 - a) * b * value(i, j + 1) + a * b * value(i + 1, j + 1);
}

std::array<double, 2> ScalarField2D::gradient(int i, int j) const {
    double dr, dz;
    const double h = grid.h;
    if (i == 0)
        dr = (value(1, j) - value(0, j)) / h;
    else if (i == grid.nr - 1)
        dr = (value(i, j) - value(i - 1, j)) / h;
    else
        dr = (value(i + 1, j) - value(i - 1, j)) / (2 * h);
    if (j == 0)
        dz = (value(i, 1) - value(i, 0)) / h;
    else if (j == grid.nz - 1)
        dz = (value(i, j) - value(i, j - 1)) / h;
    else
        dz = (value(i, j + 1) - value(i, j - 1)) / (2 * h);
    return {dr, dz};
}

double ScalarField2D::max_gradient() const {
    std::vector<double> row_max(grid.nz, 0.0);
    par::run(grid.nz, [&](std::int64_t j) {
        double m = 0.0;
        for (int i = 0; i < grid.nr; ++i) {
            if (!is_active(i, int(j))) continue;
            auto g = gradient(i, int(j));
            m = std::max(m, std::hypot(g[0], g[1]));
        }
        row_max[j] = m;
    });
    double m = 0.0;
    for (double v : row_max) m = std::max(m, v);
    return m;
}

double ScalarField2D::laplacian(int i, int j) const {
    const double h = grid.h;
    const double uzz = (value(i, j + 1) - 2 * value(i, j) + value(i, j - 1)) / (h * h);
    if (i == 0) {
        // even in r across the axis: u_rr + (n-2) u_r / r -> (n-1) u_rr
        double urr = 2.0 * (value(1, j) - value(0, j)) / (h * h);
        return (dim_n - 1) * urr + uzz;
    }
    const double urr = (value(i + 1, j) - 2 * value(i, j) + value(i - 1, j)) / (h * h);
    const double ur = (value(i + 1, j) - value(i - 1, j)) / (2 * h);
    return urr + (dim_n - 2) * ur / grid.r(i) + uzz;
}

ScalarField2D sample_meridian(const Grid2D& g, int n,
                              const std::function<double(double, double)>& f) {
    ScalarField2D out(g, n);
    par::run(g.nz, [&](std::int64_t j) {
        for (int i = 0; i < g.nr; ++i)
            out.value(i, int(j)) = std::max(0.0, f(g.r(i), g.z(int(j))));
    });
    out.refresh_mask();
    return out;
}

std::vector<std::string> validate_field(const ScalarField2D& f, double grad_slack) {
    std::vector<std::string> violations;
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(f.u.size()); ++k) {
        if (f.u[k] < 0.0) {
            violations.push_back("negative value at flat index " + std::to_string(k));
            break;
        }
    }
    double mg = f.max_gradient();
    if (mg > 1.0 + grad_slack)
        violations.push_back("max |grad u| = " + std::to_string(mg) + " exceeds 1 + " +
                             std::to_string(grad_slack));
    return violations;
}

namespace {

// Tensor quadratic interpolation on the 3x3 window around the nearest node;
// falls back to bilinear at the grid edge. Returns false when the window
// touches the zero set (the kink would corrupt the quadratic model).
bool interp_quadratic(const ScalarField2D& f, double r, double z, double& out) {
    const Grid2D& g = f.grid;
    r = std::fabs(r);
    int i0 = static_cast<int>(std::round(r / g.h));
    int j0 = static_cast<int>(std::round((z - g.z0) / g.h));
    if (i0 < 1 || i0 > g.nr - 2 || j0 < 1 || j0 > g.nz - 2) {
        out = f.interp(r, z);
        return true;
    }
    double a = r / g.h - i0, b = (z - g.z0) / g.h - j0;  // in [-1/2, 1/2]
    double wr[3] = {0.5 * a * (a - 1), (1 - a) * (1 + a), 0.5 * a * (a + 1)};
    double wz[3] = {0.5 * b * (b - 1), (1 - b) * (1 + b), 0.5 * b * (b + 1)};
    double v = 0.0;
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            if (!f.is_active(i0 + di, j0 + dj)) return false;
            v += wr[di + 1] * wz[dj + 1] * f.value(i0 + di, j0 + dj);
        }
    out = v;
    return true;
}

}  // namespace

double probe_gradient(const ScalarField2D& f, double pr, double pz, double nx, double nz,
                      double delta) {
    // Least-squares fit of u(p + t n) = m t + a t^2 + c t^3 over a short ray
    // of interpolated samples; m is the normal derivative at the boundary
    // point, where u vanishes. Falls back to the two-point difference when
    // the quadratic window is unusable next to the free boundary.
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0;
    double y1 = 0, y2 = 0, y3 = 0;
    int used = 0;
    for (int k = 0; k < 10; ++k) {
        double t = delta * (0.8 + 0.35 * k);
        double u;
        if (!f.in_hull(pr + t * nx, pz + t * nz)) break;
        if (!interp_quadratic(f, pr + t * nx, pz + t * nz, u)) continue;
        double t2 = t * t, t3 = t2 * t;
        s1 += t2;
        s2 += t3;
        s3 += t2 * t2;
        s4 += t2 * t3;
        s5 += t3 * t3;
        y1 += t * u;
        y2 += t2 * u;
        y3 += t3 * u;
        ++used;
    }
    if (used >= 5) {
        // normal equations for (m, a, c) against basis (t, t^2, t^3)
        double A[3][3] = {{s1, s2, s3}, {s2, s3, s4}, {s3, s4, s5}};
        double rhs[3] = {y1, y2, y3};
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int row = col + 1; row < 3; ++row)
                if (std::fabs(A[row][col]) > std::fabs(A[piv][col])) piv = row;
            std::swap(A[piv], A[col]);
            std::swap(rhs[piv], rhs[col]);
            if (std::fabs(A[col][col]) < 1e-30) { used = 0; break; }
            for (int row = col + 1; row < 3; ++row) {
                double fac = A[row][col] / A[col][col];
                for (int cc = col; cc < 3; ++cc) A[row][cc] -= fac * A[col][cc];
                rhs[row] -= fac * rhs[col];
            }
        }
        if (used >= 5) {
            double c = rhs[2] / A[2][2];
            double a = (rhs[1] - A[1][2] * c) / A[1][1];
            double m = (rhs[0] - A[0][1] * a - A[0][2] * c) / A[0][0];
            return m;
        }
    }
    double u1 = f.interp(pr + delta * nx, pz + delta * nz);
    double u2 = f.interp(pr + 2 * delta * nx, pz + 2 * delta * nz);
    return (4.0 * u1 - u2) / (2.0 * delta);
}

ScalarField2D mirror_even(const ScalarField2D& half) {
    if (std::fabs(half.grid.z0) > 1e-12)
        throw GeometryError("mirror_even expects a half field with z0 = 0");
    Grid2D g;
    g.h = half.grid.h;
    g.nr = half.grid.nr;
    g.nz = 2 * half.grid.nz - 1;
    g.z0 = -half.grid.z_max();
    ScalarField2D out(g, half.dim_n);
    int mid = half.grid.nz - 1;
    for (int j = 0; j < half.grid.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            double v = half.value(i, j);
            out.value(i, mid + j) = v;
            out.value(i, mid - j) = v;
        }
    out.refresh_mask();
    return out;
}

ScalarField2D upper_part(const ScalarField2D& f) {
    ScalarField2D out = f;
    for (int j = 0; j < f.grid.nz; ++j)
        for (int i = 0; i < f.grid.nr; ++i)
            if (f.grid.z(j) <= 0.0) out.value(i, j) = 0.0;
    out.refresh_mask();
    return out;
}

void write_field_csv(const ScalarField2D& f, const std::string& path) {
    std::ostringstream out;
    out << "r,z,u\n";
    for (int j = 0; j < f.grid.nz; ++j)
        for (int i = 0; i < f.grid.nr; ++i)
            out << format_double(f.grid.r(i)) << ',' << format_double(f.grid.z(j)) << ','
                << format_double(f.value(i, j)) << '\n';
    atomic_write(path, out.str());
}

ScalarField2D read_field_csv(const std::string& path, int dim_n) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("r,z,u", 0) != 0)
        throw IoError("field csv missing 'r,z,u' header: " + path);
    std::vector<double> rs, zs, us;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double r, z, v;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &z, &v) != 3)
            throw IoError("bad field csv row: " + line);
        rs.push_back(r);
        zs.push_back(z);
        us.push_back(v);
    }
    if (us.empty()) throw IoError("empty field csv: " + path);
    // infer grid: r varies fastest
    int nr = 1;
    while (nr < static_cast<int>(rs.size()) && rs[nr] > rs[nr - 1]) ++nr;
    if (static_cast<int>(us.size()) % nr != 0) throw IoError("ragged field csv: " + path);
    int nz = static_cast<int>(us.size()) / nr;
    Grid2D g;
    g.nr = nr;
    g.nz = nz;
    g.h = nr > 1 ? rs[1] - rs[0] : (nz > 1 ? zs[nr] - zs[0] : 1.0);
    g.z0 = zs[0];
    ScalarField2D f(g, dim_n);
    f.u = us;
    f.refresh_mask();
    return f;
}

}  // namespace bernoulli
