// Command-line driver: solve / diagnose / fixtures / radial pipelines with
// reproducible reports. Exit codes: 0 pass, 1 usage or I/O error, 2 check
// failure or non-convergence.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bernoulli/config.hpp"
#include "bernoulli/diagnose.hpp"
#include "bernoulli/errors.hpp"
#include "bernoulli/fixtures.hpp"
#include "bernoulli/io.hpp"
#include "bernoulli/report.hpp"
#include "bernoulli/solver.hpp"

using namespace bernoulli;

namespace {

int cmd_solve(const std::string& config_path, const std::string& out_dir,
              const std::string& resume_dir, const std::string& overrides) {
    ProblemConfig cfg = load_config(config_path);
    if (!overrides.empty()) apply_overrides(cfg, overrides);

    SolveResult result;
    if (!resume_dir.empty()) {
        SolveState restored = load_checkpoint(resume_dir, cfg);
        result = resume_axisymmetric(cfg, restored);
    } else {
        result = solve_axisymmetric(cfg);
    }

    save_checkpoint(result.state, out_dir);
    write_field_csv(result.full_field, out_dir + "/field_full.csv");

    SolutionReport verify = verify_solution(result.full_field, result.state.graph, cfg);
    DiagnosticsReport rep;
    rep.config = config_json(cfg);
    rep.checks.push_back({"fb_gradient_residual", "free_boundary_gradient_condition",
                          verify.fb_residual, cfg.tol_fb, verify.fb_residual <= cfg.tol_fb});
    rep.checks.push_back({"harmonicity_residual", "harmonicity", verify.harmonicity_residual,
                          verify.harmonicity_bound,
                          verify.harmonicity_residual <= verify.harmonicity_bound});
    rep.checks.push_back({"gradient_bound", "global_gradient_bound", verify.max_gradient,
                          verify.gradient_bound, verify.max_gradient <= verify.gradient_bound});
    rep.checks.push_back({"graphical_free_boundary", "two_component_decomposition",
                          verify.graphical ? 1.0 : 0.0, 0.0, verify.graphical});
    rep.checks.push_back({"graph_monotone", "graph_monotonicity",
                          verify.g_monotone ? 1.0 : 0.0, 0.0, verify.g_monotone});
    rep.checks.push_back({"graph_bounded", "graph_boundedness", verify.g_growth_tail, 0.0,
                          verify.g_bounded});
    write_report(rep, out_dir + "/solve_report.json");

    if (!result.converged) {
        std::cerr << "solver did not converge: " << result.message << "\n";
        return 2;
    }
    if (!verify.pass(cfg)) {
        std::cerr << "verification failed (see solve_report.json)\n";
        return 2;
    }
    return 0;
}

int cmd_diagnose(const std::string& field_path, const std::string& graph_path,
                 const std::string& state_path, const std::string& config_path,
                 const std::string& out_dir, const std::vector<std::string>& checks,
                 const std::string& overrides) {
    ProblemConfig cfg = config_path.empty() ? ProblemConfig{} : load_config(config_path);
    if (!overrides.empty()) apply_overrides(cfg, overrides);

    ScalarField2D field = read_field_csv(field_path, cfg.n);
    std::optional<FreeBoundaryGraph> graph;
    if (!graph_path.empty()) graph = read_graph_csv(graph_path);

    DiagnoseInputs in;
    in.field = &field;
    if (graph) in.graph = &*graph;
    if (!state_path.empty()) {
        nlohmann::json j = nlohmann::json::parse(read_text_file(state_path));
        in.b = j.at("b").get<double>();
        in.c = j.at("c").get<double>();
    }

    std::vector<std::string> selected = checks.empty() ? all_check_names() : checks;
    DiagnosticsReport rep = run_diagnostics(in, cfg, selected, out_dir);
    write_report(rep, out_dir + "/report.json");
    return rep.all_pass() ? 0 : 2;
}

int cmd_fixtures(const std::string& out_dir, const std::vector<int>& ns) {
    write_fixtures(out_dir, ns);
    return 0;
}

int cmd_radial(int n, const std::string& out_dir, double rho_max, double step) {
    RadialProfile prof = solve_radial(n, rho_max, step);
    std::string csv = "rho,u,du\n";
    for (size_t i = 0; i < prof.u.size(); i += 50)
        csv += format_double(prof.rho(int(i))) + "," + format_double(prof.u[i]) + "," +
               format_double(prof.du[i]) + "\n";
    atomic_write(out_dir + "/radial_profile.csv", csv);

    double worst = 0.0;
    for (double rho = 1.0; rho <= rho_max; rho += 0.1) {
        double exact = (1.0 - std::pow(rho, 2.0 - n)) / (n - 2);
        worst = std::max(worst, std::fabs(prof.eval(rho) - exact));
    }
    ProblemConfig cfg;
    cfg.n = n;
    DiagnosticsReport rep;
    rep.config = config_json(cfg);
    rep.checks.push_back({"radial_closed_form_deviation", "radial_classification", worst, 1e-8,
                          worst <= 1e-8});
    write_report(rep, out_dir + "/radial_report.json");
    return worst <= 1e-8 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the one-phase free boundary problem"};
    app.require_subcommand(1);

    std::string config_path, out_dir, resume_dir, overrides;
    std::string field_path, graph_path, state_path;
    std::vector<std::string> checks;
    std::vector<int> ns = {3, 4, 5, 6};
    int n = 3;
    double rho_max = 100.0, step = 1e-3;

    CLI::App* solve = app.add_subcommand("solve", "run the axisymmetric solver");
    solve->add_option("--config", config_path, "config file")->required();
    solve->add_option("--out", out_dir, "output directory")->required();
    solve->add_option("--resume", resume_dir, "checkpoint directory to resume from");
    solve->add_option("--tol-overrides", overrides, "key=value,... config overrides");

    CLI::App* diagnose = app.add_subcommand("diagnose", "post-hoc checks on a field/graph pair");
    diagnose->add_option("--field", field_path, "field csv")->required();
    diagnose->add_option("--graph", graph_path, "graph csv");
    diagnose->add_option("--state", state_path, "solver state json (b, c pair)");
    diagnose->add_option("--config", config_path, "config file");
    diagnose->add_option("--out", out_dir, "output directory")->required();
    diagnose->add_option("--checks", checks, "subset of checks")->delimiter(',');
    diagnose->add_option("--tol-overrides", overrides, "key=value,... config overrides");

    CLI::App* fixtures = app.add_subcommand("fixtures", "write the reference fixture corpus");
    fixtures->add_option("--out", out_dir, "output directory")->required();
    fixtures->add_option("--n", ns, "dimension list")->delimiter(',');

    CLI::App* radial = app.add_subcommand("radial", "radial solution by ODE integration");
    radial->add_option("--n", n, "ambient dimension");
    radial->add_option("--out", out_dir, "output directory")->required();
    radial->add_option("--rho-max", rho_max, "integration range");
    radial->add_option("--step", step, "integration step");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return cmd_solve(config_path, out_dir, resume_dir, overrides);
        if (*diagnose)
            return cmd_diagnose(field_path, graph_path, state_path, config_path, out_dir,
                                checks, overrides);
        if (*fixtures) return cmd_fixtures(out_dir, ns);
        if (*radial) return cmd_radial(n, out_dir, rho_max, step);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 1;
}
