#include "bernoulli/components.hpp"

#include <cmath>
#include <vector>

#include "bernoulli/errors.hpp"

namespace bernoulli {

namespace {

// Flood-fill labels over active nodes with 3-d radius > R0; label 0 = unvisited.
std::vector<int> label_components(const ScalarField2D& f, double R0, int& count) {
    const Grid2D& g = f.grid;
    std::vector<int> label(g.size(), 0);
    auto eligible = [&](int i, int j) {
        return f.is_active(i, j) && std::hypot(g.r(i), g.z(j)) > R0;
    };
    count = 0;
    std::vector<std::int64_t> stack;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            if (!eligible(i, j) || label[g.idx(i, j)] != 0) continue;
            ++count;
            stack.push_back(g.idx(i, j));
            label[g.idx(i, j)] = count;
            while (!stack.empty()) {
                std::int64_t k = stack.back();
                stack.pop_back();
                int ci = static_cast<int>(k % g.nr), cj = static_cast<int>(k / g.nr);
                const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    int ni = ci + di[d], nj = cj + dj[d];
                    if (ni < 0 || ni >= g.nr || nj < 0 || nj >= g.nz) continue;
                    if (!eligible(ni, nj) || label[g.idx(ni, nj)] != 0) continue;
                    label[g.idx(ni, nj)] = count;
                    stack.push_back(g.idx(ni, nj));
                }
            }
        }
    return label;
}

}  // namespace

int count_components_outside(const ScalarField2D& field, double R0) {
    int count = 0;
    label_components(field, R0, count);
    return count;
}

std::pair<ScalarField2D, ScalarField2D> decompose_components(const ScalarField2D& field,
                                                             double R0) {
    int count = 0;
    std::vector<int> label = label_components(field, R0, count);
    if (count != 2)
        throw ComponentCountError("expected 2 components outside B_R0, found " +
                                  std::to_string(count));

    const Grid2D& g = field.grid;
    // Identify which label lives in the upper half by its topmost node.
    double best_z[3] = {0, -1e300, -1e300};
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            int l = label[g.idx(i, j)];
            if (l > 0) best_z[l] = std::max(best_z[l], g.z(j));
        }
    int upper_label = best_z[1] >= best_z[2] ? 1 : 2;

    ScalarField2D up(g, field.dim_n), down(g, field.dim_n);
    for (std::int64_t k = 0; k < g.size(); ++k) {
        if (label[k] == 0) continue;
        if (label[k] == upper_label)
            up.u[k] = field.u[k];
        else
            down.u[k] = field.u[k];
    }
    up.refresh_mask();
    down.refresh_mask();
    return {up, down};
}

}  // namespace bernoulli
