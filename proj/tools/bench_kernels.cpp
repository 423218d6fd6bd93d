// Times the serial reference kernels against their OpenMP variants on a
// representative workload and prints one table row per kernel.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "bernoulli/energy.hpp"
#include "bernoulli/parallel.hpp"
#include "bernoulli/quadrature.hpp"
#include "bernoulli/reference.hpp"
#include "bernoulli/solver.hpp"

using namespace bernoulli;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    auto t0 = Clock::now();
    for (int k = 0; k < reps; ++k) fn();
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double omp_ms) {
    std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, omp_ms,
                serial_ms / omp_ms);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", par::max_threads());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    // workload: radial reference field on a production-size grid
    Grid2D quarter = Grid2D::make(0.05, 32.0, 0.0, 16.0);
    FreeBoundaryGraph graph;
    graph.r_tip = 1.0;
    graph.h = 0.05;
    graph.g.assign(static_cast<size_t>((32.0 - 1.0) / 0.05) + 1, 0.0);
    for (int i = 0; i < graph.size(); ++i)
        graph.g[i] = 0.5 * (1.0 - 1.0 / graph.r(i));
    auto far = [](double, double z) { return z - 0.5 + 0.25 / std::max(1.0, z); };
    MixedStencil st = build_mixed_stencil(quarter, 3, ZeroSet::subgraph(&graph), far);
    std::vector<double> u(quarter.size(), 0.0);

    double s1 = time_ms([&] {
        sor_sweep_serial(st, u, 0, 1.9);
        sor_sweep_serial(st, u, 1, 1.9);
    }, 20);
    double p1 = time_ms([&] {
        sor_sweep_omp(st, u, 0, 1.9);
        sor_sweep_omp(st, u, 1, 1.9);
    }, 20);
    row("sor_sweep (red+black)", s1, p1);

    double s2 = time_ms([&] { (void)stencil_residual_serial(st, u); }, 20);
    double p2 = time_ms([&] { (void)stencil_residual_omp(st, u); }, 20);
    row("stencil_residual", s2, p2);

    ScalarField2D field = ReferenceSolution::radial(3).sample(
        Grid2D::make(0.05, 9.6, -9.6, 9.6));
    std::vector<double> contrib;
    double s3 = time_ms([&] { energy_cell_contributions_serial(field, 0.0, 8.0, contrib); }, 10);
    double p3 = time_ms([&] { energy_cell_contributions_omp(field, 0.0, 8.0, contrib); }, 10);
    row("energy_cell_contributions", s3, p3);

    return 0;
}
