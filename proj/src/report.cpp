#include "bernoulli/report.hpp"

#include <cmath>

#include "bernoulli/errors.hpp"
#include "bernoulli/io.hpp"

namespace bernoulli {

bool DiagnosticsReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

nlohmann::json DiagnosticsReport::to_json() const {
    nlohmann::json j;
    j["config"] = config;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["ref"] = c.ref;
        e["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        j["checks"].push_back(e);
    }
    return j;
}

nlohmann::json config_json(const ProblemConfig& cfg) {
    nlohmann::json j;
    j["n"] = cfg.n;
    j["h"] = cfg.h;
    j["r_max"] = cfg.r_max;
    j["z_max"] = cfg.z_max;
    j["conditional"] = cfg.conditional();
    j["normalization"] = "r_tip = 1, |grad u| = 1 on the free boundary";
    j["tol_fb"] = cfg.tol_fb;
    j["tol_c"] = cfg.tol_c;
    j["tol_w"] = cfg.tol_w;
    j["tol_symmetry"] = cfg.tol_symmetry;
    j["tol_mean_convexity"] = cfg.tol_mean_convexity;
    j["tol_eigen"] = cfg.tol_eigen;
    return j;
}

bool validate_report_json(const nlohmann::json& j, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (!j.is_object()) return fail("report must be an object");
    if (!j.contains("config") || !j["config"].is_object())
        return fail("missing object field 'config'");
    if (!j.contains("checks") || !j["checks"].is_array())
        return fail("missing array field 'checks'");
    for (const auto& e : j["checks"]) {
        if (!e.is_object()) return fail("check entries must be objects");
        if (!e.contains("name") || !e["name"].is_string()) return fail("check missing 'name'");
        if (!e.contains("ref") || !e["ref"].is_string()) return fail("check missing 'ref'");
        if (!e.contains("value") || !(e["value"].is_number() || e["value"].is_null()))
            return fail("check missing numeric 'value'");
        if (!e.contains("tolerance") || !e["tolerance"].is_number())
            return fail("check missing numeric 'tolerance'");
        if (!e.contains("pass") || !e["pass"].is_boolean()) return fail("check missing 'pass'");
    }
    return true;
}

void write_report(const DiagnosticsReport& report, const std::string& path) {
    nlohmann::json j = report.to_json();
    std::string why;
    if (!validate_report_json(j, &why)) throw IoError("report failed schema validation: " + why);
    atomic_write(path, j.dump(2) + "\n");
}

}  // namespace bernoulli
