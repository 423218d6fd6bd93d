#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bernoulli/config.hpp"

namespace bernoulli {

// One verified quantity. `ref` names the mathematical property the check
// exercises (slug form, stable across runs).
struct CheckResult {
    std::string name;
    std::string ref;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct DiagnosticsReport {
    nlohmann::json config;
    std::vector<CheckResult> checks;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

nlohmann::json config_json(const ProblemConfig& cfg);

// Structural validation against the shipped schema (schema/report.schema.json).
bool validate_report_json(const nlohmann::json& j, std::string* why = nullptr);

void write_report(const DiagnosticsReport& report, const std::string& path);

}  // namespace bernoulli
