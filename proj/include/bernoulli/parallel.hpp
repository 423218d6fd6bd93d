#pragma once

#include <cstdint>
#include <vector>

#ifdef BERNOULLI_HAS_OPENMP
#include <omp.h>
#endif

namespace bernoulli::par {

// Thread budget: min(hardware, BERNOULLI_LAB_THREADS). A cap of 1 runs everything serial.
int max_threads();

// Programmatic override of the env cap; 0 restores the default.
void set_thread_cap(int cap);

bool enabled();

// Static-schedule parallel loop over [0, n). Bodies must write to disjoint
// locations; order-dependent reductions belong to the caller.
template <class F>
void run(std::int64_t n, F&& body) {
#ifdef BERNOULLI_HAS_OPENMP
    if (enabled() && n >= 256) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Fixed-order sum of a contribution array. Every quadrature fills per-cell
// contributions (possibly in parallel) and reduces through here, so results
// do not depend on the schedule or the thread count.
double ordered_sum(const std::vector<double>& contrib);

}  // namespace bernoulli::par
