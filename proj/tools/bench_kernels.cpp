// Serial vs OpenMP timing for the batch kernels. The two paths compute
// bitwise-identical results (tested in test_kernels.cpp); this target shows
// what the parallel variants buy at various pack sizes.
//
// Usage: bench_kernels [n1,n2,...] [repeats]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "packflow/kernels.hpp"
#include "packflow/solver.hpp"

using namespace packflow;
using clock_type = std::chrono::steady_clock;

namespace {

double time_best_of(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int rep = 0; rep < repeats; ++rep) {
        std::size_t iters = 1;
        while (true) {
            const auto start = clock_type::now();
            for (std::size_t i = 0; i < iters; ++i) fn();
            const double s = std::chrono::duration<double>(clock_type::now() - start).count();
            if (s >= 0.01 || iters >= (1u << 20)) {
                best = std::min(best, s / static_cast<double>(iters));
                break;
            }
            iters *= 2;
        }
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> sizes = {64, 256, 1024, 4096};
    int repeats = 5;
    if (argc > 1) {
        sizes.clear();
        std::istringstream ss(argv[1]);
        std::string item;
        while (std::getline(ss, item, ',')) sizes.push_back(std::stoul(item));
    }
    if (argc > 2) repeats = std::atoi(argv[2]);

    std::printf("threads available: %d\n", kernels::max_threads());
    std::printf("%8s  %-16s  %12s  %12s  %8s\n", "n", "kernel", "serial_us", "parallel_us",
                "speedup");

    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> z_draw(0.05, 0.95);

    for (std::size_t n : sizes) {
        std::vector<CellParameters> cells(n);
        std::vector<CellState> states(n);
        for (std::size_t k = 0; k < n; ++k) {
            cells[k].capacity_As = 2.6 * 3600.0;
            cells[k].rc_capacitance_C = 634.0;
            cells[k].rc_resistance_F = Polynomial({-0.02, 0.01, 0.04});
            cells[k].series_resistance_r = Polynomial({-0.056, 0.116, -0.073, 0.0393});
            cells[k].ocv = Polynomial({4.732169, -18.151627, 32.677313, -35.907226, 26.813193,
                                       -13.899898, 4.753967, 2.490128});
            states[k] = {z_draw(rng), 0.01};
        }
        std::vector<double> vbar(n), r(n), f(n);
        std::vector<double> currents(n, 1.0);
        std::vector<CellDerivative> deriv(n);

        const double t_alg_s = time_best_of(repeats, [&] {
            kernels::eval_cell_algebra(cells, states, vbar, r, f, kernels::Exec::serial);
        });
        const double t_alg_p = time_best_of(repeats, [&] {
            kernels::eval_cell_algebra(cells, states, vbar, r, f, kernels::Exec::parallel);
        });
        std::printf("%8zu  %-16s  %12.3f  %12.3f  %7.2fx\n", n, "cell_algebra", 1e6 * t_alg_s,
                    1e6 * t_alg_p, t_alg_s / t_alg_p);

        const double t_der_s = time_best_of(repeats, [&] {
            kernels::eval_derivatives(cells, states, currents, f, deriv, kernels::Exec::serial);
        });
        const double t_der_p = time_best_of(repeats, [&] {
            kernels::eval_derivatives(cells, states, currents, f, deriv, kernels::Exec::parallel);
        });
        std::printf("%8zu  %-16s  %12.3f  %12.3f  %7.2fx\n", n, "derivatives", 1e6 * t_der_s,
                    1e6 * t_der_p, t_der_s / t_der_p);

        // LU on the Kirchhoff matrix of this pack size (dense-solver path).
        if (n <= 2048) {
            PackResistances res;
            res.series_r = r;
            res.interconnect_R.assign(n - 1, 1e-5);
            const DenseSystem sys = build_a22_interconnect(res, vbar, 10.0);
            std::vector<double> a(sys.a.size());
            std::vector<std::size_t> perm(n);
            const double t_lu_s = time_best_of(std::max(2, repeats / 2), [&] {
                a = sys.a;
                kernels::lu_factor(a, n, perm, kernels::Exec::serial);
            });
            const double t_lu_p = time_best_of(std::max(2, repeats / 2), [&] {
                a = sys.a;
                kernels::lu_factor(a, n, perm, kernels::Exec::parallel);
            });
            std::printf("%8zu  %-16s  %12.3f  %12.3f  %7.2fx\n", n, "lu_factor", 1e6 * t_lu_s,
                        1e6 * t_lu_p, t_lu_s / t_lu_p);
        }
    }
    return 0;
}
