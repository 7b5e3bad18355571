#include "packflow/design.hpp"

#include <cmath>
#include <string>

namespace packflow {

namespace {

void check_shapes(std::span<const double> capacities, std::span<const double> interconnect_R) {
    if (capacities.size() < 2) throw ValidationError("matching needs at least two cells");
    if (interconnect_R.size() + 1 != capacities.size())
        throw ValidationError("interconnect_R must have n-1 entries");
    for (double q : capacities)
        if (!(q > 0.0)) throw ValidationError("capacities must be > 0");
}

} // namespace

std::vector<double> qr_residuals(std::span<const double> capacities_As,
                                 std::span<const double> series_r,
                                 std::span<const double> interconnect_R) {
    check_shapes(capacities_As, interconnect_R);
    if (series_r.size() != capacities_As.size())
        throw ValidationError("series_r must have one entry per cell");

    const std::size_t n = capacities_As.size();
    std::vector<double> out(n - 1, 0.0);
    double suffix = capacities_As[n - 1]; // sum_{k>j} Q_k, built back to front
    for (std::size_t j = n - 1; j-- > 0;) {
        out[j] = series_r[j] * capacities_As[j] - series_r[j + 1] * capacities_As[j + 1] -
                 interconnect_R[j] * suffix;
        suffix += capacities_As[j];
    }
    return out;
}

std::vector<double> synthesize_uniform_r(std::span<const double> capacities_As,
                                         std::span<const double> interconnect_R, double r_n) {
    check_shapes(capacities_As, interconnect_R);
    if (!(r_n > 0.0)) throw ValidationError("r_n must be > 0");
    for (double R : interconnect_R)
        if (!(R >= 0.0)) throw ValidationError("interconnection resistances must be >= 0");

    const std::size_t n = capacities_As.size();
    std::vector<double> r(n, 0.0);
    r[n - 1] = r_n;
    double suffix = capacities_As[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) {
        r[j] = (r[j + 1] * capacities_As[j + 1] + interconnect_R[j] * suffix) / capacities_As[j];
        suffix += capacities_As[j];
    }
    return r;
}

double verify_uniform_sharing(const PackConfig& config, const CurrentProfile& profile) {
    const std::size_t n = config.size();
    if (n > 1) {
        const CellState& first = config.initial_states.front();
        for (const CellState& s : config.initial_states)
            if (s != first)
                throw ValidationError("uniform-sharing check requires equal initial states");
    }

    const SimulationTrace trace = simulate(config, profile);
    double worst = 0.0;
    for (std::size_t s = 0; s < trace.samples(); ++s) {
        const double I = trace.applied_I[s];
        if (I == 0.0) continue;
        const double share = I / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k)
            worst = std::max(worst, std::abs(trace.at(trace.currents, s, k) - share) /
                                        std::abs(share));
    }
    return worst;
}

} // namespace packflow
