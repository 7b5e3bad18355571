#include "packflow/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace packflow::kernels {

int max_threads() {
#if defined(_OPENMP)
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* cap = std::getenv("PACKFLOW_THREADS")) {
        const int limit = std::atoi(cap);
        if (limit >= 1) n = std::min(n, limit);
    }
    return n;
}

namespace {

// Parallelizing tiny batches costs more than it saves.
constexpr std::size_t kMinParallelCells = 512;

inline void cell_algebra_one(const CellParameters& p, const CellState& s, double& vbar,
                             double& r, double& f) {
    vbar = s.relaxation_w + p.ocv.eval(s.soc_z);
    r = p.series_resistance_r.eval(s.soc_z);
    f = p.rc_resistance_F.eval(s.soc_z);
}

} // namespace

void eval_cell_algebra(std::span<const CellParameters> params, std::span<const CellState> states,
                       std::span<double> vbar_out, std::span<double> series_r_out,
                       std::span<double> rc_f_out, Exec exec) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(params.size());
#if defined(_OPENMP)
    if (exec == Exec::parallel && params.size() >= kMinParallelCells && max_threads() > 1) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
        for (std::ptrdiff_t k = 0; k < n; ++k)
            cell_algebra_one(params[k], states[k], vbar_out[k], series_r_out[k], rc_f_out[k]);
        return;
    }
#else
    (void)exec;
#endif
    for (std::ptrdiff_t k = 0; k < n; ++k)
        cell_algebra_one(params[k], states[k], vbar_out[k], series_r_out[k], rc_f_out[k]);
}

void eval_derivatives(std::span<const CellParameters> params, std::span<const CellState> states,
                      std::span<const double> currents, std::span<const double> rc_f,
                      std::span<CellDerivative> out, Exec exec) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(params.size());
    std::atomic<std::ptrdiff_t> bad{-1};

    auto one = [&](std::ptrdiff_t k) {
        const double f = rc_f[k];
        if (!(f > 0.0)) {
            bad.store(k, std::memory_order_relaxed);
            out[k] = {};
            return;
        }
        out[k] = {currents[k] / params[k].capacity_As,
                  -states[k].relaxation_w / (f * params[k].rc_capacitance_C) +
                      currents[k] / params[k].rc_capacitance_C};
    };

#if defined(_OPENMP)
    if (exec == Exec::parallel && params.size() >= kMinParallelCells && max_threads() > 1) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
        for (std::ptrdiff_t k = 0; k < n; ++k) one(k);
    } else
#else
    (void)exec;
#endif
    {
        for (std::ptrdiff_t k = 0; k < n; ++k) one(k);
    }

    const std::ptrdiff_t k = bad.load(std::memory_order_relaxed);
    if (k >= 0)
        throw NonpositiveRCResistance("rc_resistance_F(z) <= 0 for cell " + std::to_string(k) +
                                      " at SoC " + std::to_string(states[k].soc_z));
}

void lu_factor(std::span<double> a, std::size_t n, std::span<std::size_t> perm, Exec exec) {
    constexpr std::size_t kMinParallelDim = 96;

    // Row scales for the relative pivot test.
    std::vector<double> scale(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s = std::max(s, std::abs(a[i * n + j]));
        scale[i] = s;
    }

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = -1.0;
        for (std::size_t i = col; i < n; ++i) {
            const double v = std::abs(a[i * n + col]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (!(best > 1e-14 * std::max(scale[piv], 1e-300)))
            throw SingularSystem("pivot below 1e-14 of row scale at column " +
                                 std::to_string(col));
        perm[col] = piv;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
            std::swap(scale[col], scale[piv]);
        }

        const double inv_pivot = 1.0 / a[col * n + col];
        const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(col) + 1;
        const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);

        auto eliminate_row = [&](std::ptrdiff_t i) {
            const double m = a[i * nn + col] * inv_pivot;
            a[i * nn + col] = m;
            const double* prow = &a[col * nn];
            double* irow = &a[i * nn];
            for (std::ptrdiff_t j = first; j < nn; ++j) irow[j] -= m * prow[j];
        };

#if defined(_OPENMP)
        if (exec == Exec::parallel && n >= kMinParallelDim && max_threads() > 1) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
            for (std::ptrdiff_t i = first; i < nn; ++i) eliminate_row(i);
            continue;
        }
#else
        (void)exec;
#endif
        for (std::ptrdiff_t i = first; i < nn; ++i) eliminate_row(i);
    }
}

void lu_solve(std::span<const double> a, std::size_t n, std::span<const std::size_t> perm,
              std::span<double> b) {
    for (std::size_t col = 0; col < n; ++col)
        if (perm[col] != col) std::swap(b[col], b[perm[col]]);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = b[i];
        for (std::size_t j = 0; j < i; ++j) acc -= a[i * n + j] * b[j];
        b[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * b[j];
        b[i] = acc / a[i * n + i];
    }
}

} // namespace packflow::kernels
