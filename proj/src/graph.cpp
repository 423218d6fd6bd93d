#include "bernoulli/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bernoulli/errors.hpp"
#include "bernoulli/io.hpp"

namespace bernoulli {

double FreeBoundaryGraph::eval(double rr) const {
    if (g.empty()) throw DegenerateGraph("empty graph");
    if (rr <= r_tip) return 0.0;
    double f = (rr - r_tip) / h;
    int i = static_cast<int>(f);
    if (i >= size() - 1) return g.back();
    double a = f - i;
    return (1 - a) * g[i] + a * g[i + 1];
}

double FreeBoundaryGraph::deriv(double rr) const {
    int i = static_cast<int>(std::round((rr - r_tip) / h));
    i = std::clamp(i, 1, size() - 2);
    return (g[i + 1] - g[i - 1]) / (2 * h);
}

double FreeBoundaryGraph::second(double rr) const {
    int i = static_cast<int>(std::round((rr - r_tip) / h));
    i = std::clamp(i, 1, size() - 2);
    return (g[i + 1] - 2 * g[i] + g[i - 1]) / (h * h);
}

double FreeBoundaryGraph::inverse(double zz) const {
    if (zz <= 0.0) return r_tip;
    if (g.empty() || zz > g.back()) return std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(g.begin(), g.end(), zz);
    int i = static_cast<int>(it - g.begin());
    if (i == 0) return r_tip;
    double g0 = g[i - 1], g1 = g[i];
    double a = g1 > g0 ? (zz - g0) / (g1 - g0) : 0.0;
    return r(i - 1) + a * h;
}

std::vector<std::string> FreeBoundaryGraph::validate() const {
    std::vector<std::string> v;
    if (g.empty()) {
        v.push_back("empty graph");
        return v;
    }
    if (std::fabs(g.front()) > 1e-12) v.push_back("g(r_tip) != 0");
    for (int i = 0; i + 1 < size(); ++i)
        if (g[i + 1] < g[i] - 1e-12) {
            v.push_back("g not nondecreasing near r = " + std::to_string(r(i)));
            break;
        }
    if (!std::isfinite(g.back())) v.push_back("g unbounded");
    return v;
}

void write_graph_csv(const FreeBoundaryGraph& gr, const std::string& path) {
    std::ostringstream out;
    out << "r,g\n";
    for (int i = 0; i < gr.size(); ++i)
        out << format_double(gr.r(i)) << ',' << format_double(gr.g[i]) << '\n';
    atomic_write(path, out.str());
}

FreeBoundaryGraph read_graph_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("r,g", 0) != 0)
        throw IoError("graph csv missing 'r,g' header: " + path);
    std::vector<double> rs, gs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double r, gv;
        if (std::sscanf(line.c_str(), "%lf,%lf", &r, &gv) != 2)
            throw IoError("bad graph csv row: " + line);
        rs.push_back(r);
        gs.push_back(gv);
    }
    if (rs.size() < 2) throw IoError("graph csv needs at least two rows: " + path);
    FreeBoundaryGraph g;
    g.r_tip = rs.front();
    g.h = rs[1] - rs[0];
    g.g = gs;
    return g;
}

}  // namespace bernoulli
