#pragma once

#include <vector>

namespace bernoulli {

struct LpResult {
    bool feasible = false;
    bool bounded = false;
    double objective = 0.0;
    std::vector<double> x;
};

// Dense two-phase simplex for  max c.x  s.t.  A x <= b, x >= 0.
// Row count may be large (tens of thousands of sup-norm constraints); the
// column count stays small here, so pivoting cost is O(rows * cols) each.
LpResult solve_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                  const std::vector<double>& c, double eps = 1e-11);

}  // namespace bernoulli
