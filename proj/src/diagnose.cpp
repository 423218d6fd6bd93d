#include "bernoulli/diagnose.hpp"

#include <algorithm>
#include <cmath>

#include "bernoulli/energy.hpp"
#include "bernoulli/errors.hpp"
#include "bernoulli/flatness.hpp"
#include "bernoulli/io.hpp"
#include "bernoulli/stability.hpp"
#include "bernoulli/symmetry.hpp"

namespace bernoulli {

std::vector<std::string> all_check_names() {
    return {"weiss", "flatness", "coeffs", "stability", "curvature", "symmetry", "barrier"};
}

namespace {

void need_graph(const DiagnoseInputs& in, const std::string& check) {
    if (!in.graph) throw ConfigError("check '" + check + "' needs a free-boundary graph");
}

void need_far_field(const DiagnoseInputs& in, const std::string& check) {
    if (!in.b || !in.c)
        throw ConfigError("check '" + check + "' needs the solver state (b, c pair)");
}

ExtendedField upper_extension(const ScalarField2D& upper, const DiagnoseInputs& in, int n) {
    return ExtendedField{&upper, ReferenceSolution::tilde_v(n, *in.b, *in.c),
                         ExtendedField::Mode::UpperOnly};
}

void check_weiss(const DiagnoseInputs& in, const ProblemConfig& cfg, DiagnosticsReport& rep,
                 const std::string& out_dir) {
    const Grid2D& g = in.field->grid;
    double top = std::min({g.r_max(), g.z_max(), -g.z_min()}) - 2 * g.h;
    std::vector<double> radii = {2.0, 4.0, 8.0};
    if (top > 8.0 * 1.2) radii.push_back(top);
    WeissScan scan = weiss_scan(*in.field, radii, cfg.tol_w);
    if (!out_dir.empty()) write_weiss_csv(scan, out_dir + "/weiss.csv");
    double worst_drop = 0.0;
    for (size_t k = 0; k + 1 < scan.values.size(); ++k)
        worst_drop = std::max(worst_drop, scan.values[k] - scan.values[k + 1]);
    rep.checks.push_back({"weiss_monotone", "weiss_monotonicity", worst_drop, cfg.tol_w,
                          worst_drop <= cfg.tol_w});
}

void check_flatness(const DiagnoseInputs& in, const ProblemConfig& cfg, DiagnosticsReport& rep,
                    const std::string& out_dir) {
    need_far_field(in, "flatness");
    ScalarField2D upper = upper_part(*in.field);
    ExtendedField ext = upper_extension(upper, in, cfg.n);
    std::vector<double> scales = {8.0, 16.0, 32.0, 64.0};
    std::vector<HeightRecord> records = height_records(ext, scales, 1.0 / 64);
    if (!out_dir.empty()) write_flatness_csv(records, out_dir + "/flatness.csv");
    double top_ratio = records.back().h_shifted / records.back().scale;
    rep.checks.push_back({"flatness_ratio_top", "asymptotic_flatness", top_ratio, 0.1,
                          top_ratio <= 0.1});
    DecayFit fit = decay_fit(records);
    bool pass = !fit.no_decay && fit.gamma >= -1.4 && fit.gamma <= -0.7;
    rep.checks.push_back({"height_decay_exponent", "annular_height_decay", fit.gamma, 0.35,
                          pass});
}

void check_coeffs(const DiagnoseInputs& in, const ProblemConfig& cfg, DiagnosticsReport& rep,
                  const std::string& out_dir) {
    need_far_field(in, "coeffs");
    ScalarField2D upper = upper_part(*in.field);
    ExtendedField ext = upper_extension(upper, in, cfg.n);
    ExtractOptions opt;
    opt.scales = {4.0, 8.0, 16.0};
    opt.fit_dn = true;
    opt.dn_scales = {8.0, 16.0};
    ExpansionCoefficients coeffs = extract_coefficients(ext, opt);
    if (!out_dir.empty()) {
        nlohmann::json j;
        j["b"] = coeffs.b;
        j["c"] = coeffs.c;
        j["d_prime"] = coeffs.d_prime;
        j["d_n"] = coeffs.d_n;
        j["d_n_fitted"] = coeffs.dn_fitted;
        j["b0"] = coeffs.b0;
        j["scales"] = coeffs.scales;
        j["b_history"] = coeffs.b_hist;
        j["c_history"] = coeffs.c_hist;
        j["dp_history"] = coeffs.dp_hist;
        j["fine_heights"] = coeffs.fine_hist;
        atomic_write(out_dir + "/coefficients.json", j.dump(2) + "\n");
    }
    rep.checks.push_back({"coeff_b_positive", "expansion_shift_positive", coeffs.b, 0.0,
                          coeffs.b > 0.0});
    rep.checks.push_back({"coeff_c_positive", "expansion_charge_positive", coeffs.c, 0.0,
                          coeffs.c > 0.0});
    double target = (cfg.n - 2) * coeffs.b * coeffs.c;
    double rel = target != 0.0 ? std::fabs(coeffs.dn_fitted - target) / std::fabs(target) : 1e300;
    rep.checks.push_back({"expansion_dn_relation", "vertical_dipole_identity", rel, 0.10,
                          rel <= 0.10});
}

void check_stability(const DiagnoseInputs& in, const ProblemConfig& cfg,
                     DiagnosticsReport& rep, const std::string&) {
    need_graph(in, "stability");
    FbSurface fb = GraphSurface{in.graph};
    double cap = std::min({in.field->grid.r_max(), in.field->grid.z_max(),
                           -in.field->grid.z_min()}) - 1.0;
    std::vector<double> rlist = {2.0, 3.0, 4.0, 6.0, 8.0, 10.0};
    std::optional<double> r0 =
        outer_stability_scan(*in.field, fb, rlist, cap, cfg.tol_eigen, 0.5, 0.5);
    double value = r0 ? *r0 : std::numeric_limits<double>::quiet_NaN();
    rep.checks.push_back({"outer_stability_radius", "outer_stability", value, 10.0,
                          r0.has_value() && *r0 <= 10.0});
}

void check_curvature(const DiagnoseInputs& in, const ProblemConfig& cfg,
                     DiagnosticsReport& rep, const std::string&) {
    need_graph(in, "curvature");
    const FreeBoundaryGraph& gr = *in.graph;
    double h = gr.h;
    double min_h = 1e300, concavity = -1e300, concavity_dim = -1e300;
    for (int i = 0; i < gr.size(); ++i) {
        double r = gr.r(i);
        if (r < gr.r_tip + 5 * h || r > cfg.r_max / 2.0) continue;
        min_h = std::min(min_h, fb_mean_curvature(gr, cfg.n, r));
        double gp = gr.deriv(r), gpp = gr.second(r);
        concavity = std::max(concavity, gpp + gp * (1 + gp * gp) / r);
        concavity_dim = std::max(concavity_dim, gpp + (cfg.n - 2) * gp * (1 + gp * gp) / r);
    }
    rep.checks.push_back({"mean_convexity_min_h", "mean_convexity", min_h,
                          cfg.tol_mean_convexity, min_h >= -cfg.tol_mean_convexity});
    rep.checks.push_back({"graph_concavity", "graph_concavity_bound", concavity,
                          cfg.tol_mean_convexity, concavity <= cfg.tol_mean_convexity});
    if (cfg.n > 3)
        rep.checks.push_back({"graph_concavity_dimensional", "graph_concavity_bound",
                              concavity_dim, cfg.tol_mean_convexity,
                              concavity_dim <= cfg.tol_mean_convexity});
    Region region = Region::annulus(
        0.0, std::min({in.field->grid.r_max(), in.field->grid.z_max()}) - 1.0);
    double tmc = total_mean_curvature(FbSurface{GraphSurface{in.graph}}, cfg.n, region);
    rep.checks.push_back({"total_mean_curvature", "total_mean_curvature_finite", tmc, 0.0,
                          std::isfinite(tmc)});
}

void check_symmetry(const DiagnoseInputs& in, const ProblemConfig& cfg,
                    DiagnosticsReport& rep, const std::string& out_dir) {
    const Grid2D& g = in.field->grid;
    ExtendedField ext{in.field, std::nullopt, ExtendedField::Mode::EvenMirror};
    if (in.b && in.c) ext.far = ReferenceSolution::tilde_v(cfg.n, *in.b, *in.c);

    std::vector<double> tv;
    for (double t = 0.0; t <= g.z_max() / 2.0 + 1e-12; t += g.h) tv.push_back(t);
    ReflectionScan vs = reflection_scan_vertical(ext, tv, cfg.tol_symmetry);
    if (!out_dir.empty()) write_reflection_csv(vs, out_dir + "/reflection_vertical.csv");
    double vmin = *std::min_element(vs.deficit.begin(), vs.deficit.end());
    rep.checks.push_back({"reflection_vertical_min_deficit", "reflection_monotonicity_vertical",
                          vmin, cfg.tol_symmetry, vmin >= -cfg.tol_symmetry});

    std::vector<double> th;
    for (double t = 0.0; t <= g.r_max() / 4.0 + 1e-12; t += g.h) th.push_back(t);
    ReflectionScan hs = reflection_scan_horizontal(ext, th, cfg.tol_symmetry);
    if (!out_dir.empty()) write_reflection_csv(hs, out_dir + "/reflection_horizontal.csv");
    double hmin = *std::min_element(hs.deficit.begin(), hs.deficit.end());
    rep.checks.push_back({"reflection_horizontal_min_deficit",
                          "reflection_monotonicity_horizontal", hmin, cfg.tol_symmetry,
                          hmin >= -cfg.tol_symmetry});

    GradientSignCheck gs = gradient_sign_check(*in.field, cfg.far_field_m);
    rep.checks.push_back({"gradient_sign_vertical", "vertical_monotonicity", gs.min_dz, 1e-6,
                          gs.min_dz >= -1e-6});
    rep.checks.push_back({"gradient_sign_radial", "radial_monotonicity", gs.max_dr, 1e-6,
                          gs.max_dr <= 1e-6});
    rep.checks.push_back({"gradient_far_lower", "far_field_gradient_lower_bound",
                          gs.far_min_dz, 0.05, gs.far_min_dz >= 0.70});
}

void check_barrier(const DiagnoseInputs& in, const ProblemConfig& cfg, DiagnosticsReport& rep,
                   const std::string&) {
    need_far_field(in, "barrier");
    BarrierCheck bc = barrier_check(*in.field, *in.b);
    rep.checks.push_back({"barrier_min_active", "lower_barrier", bc.min_active, 1e-3,
                          bc.min_active >= -1e-3});
    rep.checks.push_back({"barrier_min_all", "lower_barrier", bc.min_all, 1e-3,
                          bc.min_all >= -1e-3});
    (void)cfg;
}

}  // namespace

DiagnosticsReport run_diagnostics(const DiagnoseInputs& in, const ProblemConfig& cfg,
                                  const std::vector<std::string>& checks,
                                  const std::string& out_dir) {
    if (!in.field) throw ConfigError("diagnostics need a field");
    DiagnosticsReport rep;
    rep.config = config_json(cfg);
    for (const std::string& c : checks) {
        if (c == "weiss")
            check_weiss(in, cfg, rep, out_dir);
        else if (c == "flatness")
            check_flatness(in, cfg, rep, out_dir);
        else if (c == "coeffs")
            check_coeffs(in, cfg, rep, out_dir);
        else if (c == "stability")
            check_stability(in, cfg, rep, out_dir);
        else if (c == "curvature")
            check_curvature(in, cfg, rep, out_dir);
        else if (c == "symmetry")
            check_symmetry(in, cfg, rep, out_dir);
        else if (c == "barrier")
            check_barrier(in, cfg, rep, out_dir);
        else
            throw ConfigError("unknown check '" + c + "'");
    }
    return rep;
}

}  // namespace bernoulli
