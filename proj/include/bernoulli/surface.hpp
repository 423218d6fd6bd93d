#pragma once

#include <variant>

#include "bernoulli/graph.hpp"

namespace bernoulli {

// Free-boundary surface descriptors. The solver's boundary is a rotated
// graph; the radial solution's is a sphere; the half-plane's is flat.
struct GraphSurface {
    const FreeBoundaryGraph* graph;
};
struct SphereSurface {
    double radius;
};
struct FlatSurface {
    double height;  // |z| = height; height 0 collapses to one sheet
};

using FbSurface = std::variant<GraphSurface, SphereSurface, FlatSurface>;

// Signed scalar mean curvature (sum of principal curvatures) of the rotated
// graph with respect to the normal pointing into the zero set. The convention
// is anchored so a sphere bounding the zero ball carries H = +(n-1)/radius.
double fb_mean_curvature(const FreeBoundaryGraph& graph, int n, double r);

double fb_mean_curvature(const FbSurface& surface, int n, double r);

}  // namespace bernoulli
