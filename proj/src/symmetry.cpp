#include "bernoulli/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "bernoulli/errors.hpp"
#include "bernoulli/io.hpp"
#include "bernoulli/parallel.hpp"

namespace bernoulli {

double reflection_deficit_vertical(const ExtendedField& field, double t) {
    const ScalarField2D& f = *field.field;
    const Grid2D& g = f.grid;
    std::vector<double> row_min(g.nz, std::numeric_limits<double>::infinity());
    par::run(g.nz, [&](std::int64_t jj) {
        int j = int(jj);
        double z = g.z(j);
        if (z < t) return;
        double zr = 2.0 * t - z;
        double m = std::numeric_limits<double>::infinity();
        if (zr >= g.z_min() - 1e-12) {
            // in-grid reflection: interpolate along the column
            double fj = (std::min(zr, g.z_max()) - g.z0) / g.h;
            int j0 = std::clamp(int(fj), 0, g.nz - 2);
            double a = fj - j0;
            for (int i = 0; i < g.nr; ++i) {
                double refl = (1 - a) * f.value(i, j0) + a * f.value(i, j0 + 1);
                m = std::min(m, f.value(i, j) - refl);
            }
        } else {
            for (int i = 0; i < g.nr; ++i)
                m = std::min(m, f.value(i, j) - field.eval(g.r(i), zr));
        }
        row_min[jj] = m;
    });
    double m = std::numeric_limits<double>::infinity();
    for (double v : row_min) m = std::min(m, v);
    if (!std::isfinite(m)) throw RegionOutOfDomain("no samples above the reflection plane");
    return m;
}

namespace {

// Minimum of u(s, z_row) - u(rho_i, z_row) over the admissible reflected radii
// s in [|rho_i - 2t|, rho_i]; grid radii enter exactly, window ends by linear
// interpolation.
double row_window_deficit(const ScalarField2D& f, int j, double t) {
    const Grid2D& g = f.grid;
    const int nr = g.nr;
    const double h = g.h;
    auto val = [&](int i) { return f.value(i, j); };
    auto interp_r = [&](double rr) {
        double fi = std::clamp(rr / h, 0.0, double(nr - 1));
        int i0 = std::min(nr - 2, int(fi));
        double a = fi - i0;
        return (1 - a) * val(i0) + a * val(i0 + 1);
    };

    double best = std::numeric_limits<double>::infinity();
    int i_t = static_cast<int>(std::ceil((t - 1e-12) / h));

    // phase A: rho <= 2t, the window expands on both sides
    double run_min = std::numeric_limits<double>::infinity();
    int left_cover = std::numeric_limits<int>::max();   // smallest grid index absorbed
    int right_cover = -1;                               // largest grid index absorbed
    for (int i = std::max(0, i_t); i < nr && g.r(i) <= 2 * t + 1e-12; ++i) {
        double rho = g.r(i);
        double lo = std::fabs(rho - 2 * t), hi = rho;
        int li = static_cast<int>(std::ceil(lo / h - 1e-12));
        int ri = static_cast<int>(std::floor(hi / h + 1e-12));
        for (int k = std::min(left_cover - 1, ri); k >= li; --k) run_min = std::min(run_min, val(k));
        left_cover = std::min(left_cover, li);
        for (int k = std::max(right_cover + 1, li); k <= ri; ++k) run_min = std::min(run_min, val(k));
        right_cover = std::max(right_cover, ri);
        double wmin = std::min(run_min, std::min(interp_r(lo), interp_r(hi)));
        best = std::min(best, wmin - val(i));
    }

    // phase B: rho >= 2t, both window ends move right (monotonic deque)
    std::deque<std::pair<int, double>> dq;  // (index, value), values increasing
    int next_in = 0;
    int start = std::max(std::max(0, i_t), static_cast<int>(std::ceil(2 * t / h - 1e-12)));
    for (int i = start; i < nr; ++i) {
        double rho = g.r(i);
        double lo = rho - 2 * t, hi = rho;
        int li = static_cast<int>(std::ceil(lo / h - 1e-12));
        int ri = static_cast<int>(std::floor(hi / h + 1e-12));
        while (next_in <= ri) {
            double v = val(next_in);
            while (!dq.empty() && dq.back().second >= v) dq.pop_back();
            dq.emplace_back(next_in, v);
            ++next_in;
        }
        while (!dq.empty() && dq.front().first < li) dq.pop_front();
        double wmin = dq.empty() ? std::numeric_limits<double>::infinity() : dq.front().second;
        wmin = std::min(wmin, std::min(interp_r(std::max(0.0, lo)), interp_r(hi)));
        best = std::min(best, wmin - val(i));
    }
    return best;
}

}  // namespace

double reflection_deficit_horizontal(const ExtendedField& field, double t) {
    const ScalarField2D& f = *field.field;
    const Grid2D& g = f.grid;
    std::vector<double> row_min(g.nz, std::numeric_limits<double>::infinity());
    par::run(g.nz, [&](std::int64_t j) { row_min[j] = row_window_deficit(f, int(j), t); });
    double m = std::numeric_limits<double>::infinity();
    for (double v : row_min) m = std::min(m, v);
    if (!std::isfinite(m)) throw RegionOutOfDomain("no samples right of the reflection plane");
    return m;
}

namespace {

ReflectionScan scan_impl(const std::string& axis, const ExtendedField& field,
                         const std::vector<double>& ts, double tol,
                         double (*deficit_fn)(const ExtendedField&, double)) {
    ReflectionScan scan;
    scan.axis = axis;
    scan.t = ts;
    scan.deficit.resize(ts.size());
    for (size_t k = 0; k < ts.size(); ++k) {
        scan.deficit[k] = deficit_fn(field, ts[k]);
        if (!scan.critical_t && scan.deficit[k] < -tol) scan.critical_t = ts[k];
    }
    return scan;
}

}  // namespace

ReflectionScan reflection_scan_vertical(const ExtendedField& field,
                                        const std::vector<double>& ts, double tol) {
    return scan_impl("vertical", field, ts, tol, reflection_deficit_vertical);
}

ReflectionScan reflection_scan_horizontal(const ExtendedField& field,
                                          const std::vector<double>& ts, double tol) {
    return scan_impl("horizontal", field, ts, tol, reflection_deficit_horizontal);
}

double reflection_deficit_horizontal_fn3(const std::function<double(double, double, double)>& u3,
                                         double t, double extent, double step) {
    double m = std::numeric_limits<double>::infinity();
    for (double x1 = t; x1 <= extent; x1 += step)
        for (double y = 0.0; y <= extent; y += step)
            for (double z = -extent; z <= extent; z += step)
                m = std::min(m, u3(2 * t - x1, y, z) - u3(x1, y, z));
    return m;
}

GradientSignCheck gradient_sign_check(const ScalarField2D& field, double far_m) {
    const Grid2D& g = field.grid;
    GradientSignCheck out;
    out.min_dz = std::numeric_limits<double>::infinity();
    out.max_dr = -std::numeric_limits<double>::infinity();
    out.far_min_dz = std::numeric_limits<double>::infinity();
    for (int j = 1; j < g.nz - 1; ++j) {
        double z = g.z(j);
        for (int i = 1; i < g.nr - 1; ++i) {
            if (!field.is_active(i, j)) continue;
            double dr = (field.value(i + 1, j) - field.value(i - 1, j)) / (2 * g.h);
            double dz = (field.value(i, j + 1) - field.value(i, j - 1)) / (2 * g.h);
            if (z > 0) {
                out.min_dz = std::min(out.min_dz, dz);
                if (std::hypot(g.r(i), z) >= far_m) out.far_min_dz = std::min(out.far_min_dz, dz);
            }
            out.max_dr = std::max(out.max_dr, dr);
        }
    }
    return out;
}

BarrierCheck barrier_check(const ScalarField2D& field, double b) {
    const Grid2D& g = field.grid;
    BarrierCheck out;
    out.min_active = std::numeric_limits<double>::infinity();
    out.min_all = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            double gap = field.value(i, j) - (std::fabs(g.z(j)) - b);
            out.min_all = std::min(out.min_all, gap);
            if (field.is_active(i, j)) out.min_active = std::min(out.min_active, gap);
        }
    return out;
}

void write_reflection_csv(const ReflectionScan& scan, const std::string& path) {
    std::ostringstream out;
    out << "t,deficit\n";
    for (size_t k = 0; k < scan.t.size(); ++k)
        out << format_double(scan.t[k]) << ',' << format_double(scan.deficit[k]) << '\n';
    atomic_write(path, out.str());
}

}  // namespace bernoulli
