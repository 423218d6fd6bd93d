#include "bernoulli/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bernoulli/errors.hpp"

namespace bernoulli {

void ProblemConfig::validate() const {
    if (n < 3 || n > 6) throw ConfigError("n must be in 3..6, got " + std::to_string(n));
    if (!(h > 0)) throw ConfigError("h must be positive");
    if (r_max < 8.0) throw ConfigError("r_max must be >= 8");
    if (z_max < 8.0) throw ConfigError("z_max must be >= 8");
    if (!(tau > 0 && tau <= 0.5)) throw ConfigError("tau must lie in (0, 0.5]");
    if (max_outer < 1) throw ConfigError("max_outer must be >= 1");
    if (scales.empty()) throw ConfigError("scales must be nonempty");
    for (double s : scales)
        if (!(s > 0)) throw ConfigError("scales must be positive");
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    double x = parse_double(key, v);
    if (x != std::floor(x)) throw ConfigError("expected integer for '" + key + "': " + v);
    return static_cast<int>(x);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

void set_key(ProblemConfig& cfg, const std::string& key, const std::string& value) {
    using Setter = std::function<void(ProblemConfig&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"n", [](ProblemConfig& c, const std::string& v) { c.n = parse_int("n", v); }},
        {"h", [](ProblemConfig& c, const std::string& v) { c.h = parse_double("h", v); }},
        {"r_max", [](ProblemConfig& c, const std::string& v) { c.r_max = parse_double("r_max", v); }},
        {"z_max", [](ProblemConfig& c, const std::string& v) { c.z_max = parse_double("z_max", v); }},
        {"tol_fb", [](ProblemConfig& c, const std::string& v) { c.tol_fb = parse_double("tol_fb", v); }},
        {"tol_c", [](ProblemConfig& c, const std::string& v) { c.tol_c = parse_double("tol_c", v); }},
        {"tol_w", [](ProblemConfig& c, const std::string& v) { c.tol_w = parse_double("tol_w", v); }},
        {"tol_symmetry",
         [](ProblemConfig& c, const std::string& v) { c.tol_symmetry = parse_double("tol_symmetry", v); }},
        {"tol_mean_convexity",
         [](ProblemConfig& c, const std::string& v) { c.tol_mean_convexity = parse_double("tol_mean_convexity", v); }},
        {"tol_eigen", [](ProblemConfig& c, const std::string& v) { c.tol_eigen = parse_double("tol_eigen", v); }},
        {"inner_tol", [](ProblemConfig& c, const std::string& v) { c.inner_tol = parse_double("inner_tol", v); }},
        {"harmonicity_c",
         [](ProblemConfig& c, const std::string& v) { c.harmonicity_c = parse_double("harmonicity_c", v); }},
        {"tau", [](ProblemConfig& c, const std::string& v) { c.tau = parse_double("tau", v); }},
        {"max_outer", [](ProblemConfig& c, const std::string& v) { c.max_outer = parse_int("max_outer", v); }},
        {"coeff_refresh",
         [](ProblemConfig& c, const std::string& v) { c.coeff_refresh = parse_int("coeff_refresh", v); }},
        {"b_init", [](ProblemConfig& c, const std::string& v) { c.b_init = parse_double("b_init", v); }},
        {"c_init", [](ProblemConfig& c, const std::string& v) { c.c_init = parse_double("c_init", v); }},
        {"scales", [](ProblemConfig& c, const std::string& v) { c.scales = parse_list("scales", v); }},
        {"far_field_m",
         [](ProblemConfig& c, const std::string& v) { c.far_field_m = parse_double("far_field_m", v); }},
    };
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + key + "'");
    it->second(cfg, value);
}

}  // namespace

ProblemConfig parse_config_text(const std::string& text) {
    ProblemConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        set_key(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_overrides(ProblemConfig& cfg, const std::string& overrides) {
    std::stringstream ss(overrides);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        size_t eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("override must be key=value: " + item);
        set_key(cfg, trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
    }
    cfg.validate();
}

std::string config_to_text(const ProblemConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "n = " << cfg.n << "\n"
        << "h = " << cfg.h << "\n"
        << "r_max = " << cfg.r_max << "\n"
        << "z_max = " << cfg.z_max << "\n"
        << "tol_fb = " << cfg.tol_fb << "\n"
        << "tol_c = " << cfg.tol_c << "\n"
        << "tol_w = " << cfg.tol_w << "\n"
        << "tol_symmetry = " << cfg.tol_symmetry << "\n"
        << "tol_mean_convexity = " << cfg.tol_mean_convexity << "\n"
        << "tol_eigen = " << cfg.tol_eigen << "\n"
        << "inner_tol = " << cfg.inner_tol << "\n"
        << "harmonicity_c = " << cfg.harmonicity_c << "\n"
        << "tau = " << cfg.tau << "\n"
        << "max_outer = " << cfg.max_outer << "\n"
        << "coeff_refresh = " << cfg.coeff_refresh << "\n"
        << "b_init = " << cfg.b_init << "\n"
        << "c_init = " << cfg.c_init << "\n";
    out << "scales = ";
    for (size_t i = 0; i < cfg.scales.size(); ++i) out << (i ? "," : "") << cfg.scales[i];
    out << "\nfar_field_m = " << cfg.far_field_m << "\n";
    return out.str();
}

}  // namespace bernoulli
