#pragma once

#include <cstddef>
#include <span>

#include "packflow/cell.hpp"

// Batch kernels for the per-cell inner loops and the dense factorization.
// Every kernel has a plain serial implementation and an OpenMP variant that
// partitions independent rows/cells across threads. Both orders of
// computation are identical per element, so results are bitwise equal; the
// serial path doubles as the reference in tests and benchmarks.

namespace packflow::kernels {

enum class Exec { serial, parallel };

/// Worker count for Exec::parallel: OpenMP's max, capped by the
/// PACKFLOW_THREADS environment variable. 1 without OpenMP.
int max_threads();

/// vbar_k = w_k + OCV(z_k), r_k = r(z_k), f_k = F(z_k) for every cell.
void eval_cell_algebra(std::span<const CellParameters> params, std::span<const CellState> states,
                       std::span<double> vbar_out, std::span<double> series_r_out,
                       std::span<double> rc_f_out, Exec exec);

/// ODE right-hand side for every cell, with the RC resistance already
/// evaluated at the same states. Throws NonpositiveRCResistance (after the
/// loop completes) if any rc_f <= 0.
void eval_derivatives(std::span<const CellParameters> params, std::span<const CellState> states,
                      std::span<const double> currents, std::span<const double> rc_f,
                      std::span<CellDerivative> out, Exec exec);

/// In-place LU factorization with partial pivoting of a row-major n x n
/// matrix. perm receives the pivot row chosen at each elimination step.
/// Throws SingularSystem when a pivot falls below 1e-14 of its row scale.
void lu_factor(std::span<double> a, std::size_t n, std::span<std::size_t> perm, Exec exec);

/// Solves LUx = Pb for a matrix factored by lu_factor; b is overwritten.
void lu_solve(std::span<const double> a, std::size_t n, std::span<const std::size_t> perm,
              std::span<double> b);

} // namespace packflow::kernels
