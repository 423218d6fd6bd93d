#pragma once

#include <string>
#include <vector>

namespace bernoulli {

// Sampled free-boundary graph g(r) on uniform radii r_tip + i*h.
// The zero set of the associated solution is {r >= r_tip, |z| <= g(r)},
// with g(r_tip) = 0, g nondecreasing and bounded.
struct FreeBoundaryGraph {
    double r_tip = 1.0;
    double h = 0.0;
    std::vector<double> g;

    int size() const { return static_cast<int>(g.size()); }
    double r(int i) const { return r_tip + i * h; }
    double r_end() const { return r(size() - 1); }

    // Piecewise-linear evaluation; 0 left of the tip, clamped beyond the end.
    double eval(double rr) const;
    double deriv(double rr) const;   // centered finite difference
    double second(double rr) const;  // centered finite difference

    // Inverse of the nondecreasing graph: smallest r with g(r) >= zz.
    // Returns r_tip for zz <= 0 and +inf when zz exceeds the range.
    double inverse(double zz) const;

    std::vector<std::string> validate() const;
};

void write_graph_csv(const FreeBoundaryGraph& g, const std::string& path);
FreeBoundaryGraph read_graph_csv(const std::string& path);

}  // namespace bernoulli
