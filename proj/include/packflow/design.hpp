#pragma once

#include <span>
#include <vector>

#include "packflow/sim.hpp"

// Capacity-resistance matching for uniform current sharing. A pack with
// interconnection resistances charges all cells at the same normalized rate
// exactly when r_j Q_j = r_{j+1} Q_{j+1} + R_{j+1} sum_{k>j} Q_k holds for
// every adjacent pair; these routines check that condition and synthesize
// series-resistance schedules that satisfy it.

namespace packflow {

/// residual_j = r_j Q_j - r_{j+1} Q_{j+1} - R_{j+1} sum_{k>j} Q_k for
/// j = 1..n-1 (ohm * ampere-seconds). All zero iff the pack is matched.
std::vector<double> qr_residuals(std::span<const double> capacities_As,
                                 std::span<const double> series_r,
                                 std::span<const double> interconnect_R);

/// Solves the matching condition backwards from a given r_n. With equal
/// capacities this reduces to r_j = r_{j+1} + R_{j+1} (n - j).
std::vector<double> synthesize_uniform_r(std::span<const double> capacities_As,
                                         std::span<const double> interconnect_R, double r_n);

/// Runs a simulation and returns max over time of
/// max_k |i_k - I/n| / (|I|/n); samples with I == 0 are skipped.
/// A matched pack with equal initial states stays at zero up to roundoff.
double verify_uniform_sharing(const PackConfig& config, const CurrentProfile& profile);

} // namespace packflow
