#include "bernoulli/parallel.hpp"

#include <algorithm>
#include <cstdlib>

namespace bernoulli::par {

namespace {
int g_cap = 0;

int env_cap() {
    const char* s = std::getenv("BERNOULLI_LAB_THREADS");
    if (!s) return 0;
    int v = std::atoi(s);
    return v > 0 ? v : 0;
}
}  // namespace

int max_threads() {
    int hw = 1;
#ifdef BERNOULLI_HAS_OPENMP
    hw = omp_get_max_threads();
#endif
    int cap = g_cap > 0 ? g_cap : env_cap();
    if (cap > 0) hw = std::min(hw, cap);
    return std::max(1, hw);
}

void set_thread_cap(int cap) { g_cap = cap; }

bool enabled() { return max_threads() > 1; }

double ordered_sum(const std::vector<double>& contrib) {
    double s = 0.0;
    for (double v : contrib) s += v;
    return s;
}

}  // namespace bernoulli::par
