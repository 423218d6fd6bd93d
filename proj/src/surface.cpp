#include "bernoulli/surface.hpp"

#include <cmath>

#include "bernoulli/errors.hpp"

namespace bernoulli {

double fb_mean_curvature(const FreeBoundaryGraph& graph, int n, double r) {
    if (graph.size() < 3) throw DegenerateGraph("graph too short for curvature");
    if (r < graph.r_tip + 2.0 * graph.h || r > graph.r_end() - 2.0 * graph.h)
        throw DegenerateGraph("curvature requested outside the resolved graph range");
    double gp = graph.deriv(r);
    double gpp = graph.second(r);
    double q = 1.0 + gp * gp;
    if (!(q < 1e16)) throw DegenerateGraph("graph slope overflow");
    return -(gpp / std::pow(q, 1.5) + (n - 2) * gp / (r * std::sqrt(q)));
}

double fb_mean_curvature(const FbSurface& surface, int n, double r) {
    if (const auto* g = std::get_if<GraphSurface>(&surface))
        return fb_mean_curvature(*g->graph, n, r);
    if (const auto* s = std::get_if<SphereSurface>(&surface)) return (n - 1) / s->radius;
    return 0.0;
}

}  // namespace bernoulli
