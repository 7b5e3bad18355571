#include "packflow/cell.hpp"

#include <cmath>
#include <string>

namespace packflow {

Polynomial::Polynomial(std::vector<double> coeffs_highest_first)
    : coeffs_(std::move(coeffs_highest_first)) {
    if (coeffs_.empty()) coeffs_ = {0.0};
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw ValidationError("polynomial coefficient is not finite");
    }
}

double Polynomial::eval(double z) const noexcept {
    double acc = 0.0;
    for (double c : coeffs_) acc = acc * z + c;
    return acc;
}

void CellParameters::validate() const {
    if (!(capacity_As > 0.0)) throw ValidationError("capacity_Q must be > 0");
    if (!(rc_capacitance_C > 0.0)) throw ValidationError("rc_capacitance_C must be > 0");
    if (!(soc_bounds.lo < soc_bounds.hi))
        throw ValidationError("soc_bounds must satisfy lo < hi");

    // Sign constraints are polynomial in z; a fine grid scan over the
    // operating interval is enough to reject bad parameterizations.
    constexpr int kSamples = 2000;
    for (int s = 0; s <= kSamples; ++s) {
        const double z = soc_bounds.lo + (soc_bounds.hi - soc_bounds.lo) * s / kSamples;
        if (series_resistance_r.eval(z) < 0.0)
            throw ValidationError("series_resistance_r negative at SoC " + std::to_string(z));
        if (rc_resistance_F.eval(z) <= 0.0)
            throw ValidationError("rc_resistance_F nonpositive at SoC " + std::to_string(z));
    }
}

double state_voltage(const CellParameters& params, const CellState& state) noexcept {
    return state.relaxation_w + params.ocv.eval(state.soc_z);
}

CellDerivative cell_derivative(const CellParameters& params, const CellState& state,
                               double current_A) {
    const double f = params.rc_resistance_F.eval(state.soc_z);
    if (!(f > 0.0))
        throw NonpositiveRCResistance("rc_resistance_F(z) <= 0 at SoC " +
                                      std::to_string(state.soc_z));
    return {current_A / params.capacity_As,
            -state.relaxation_w / (f * params.rc_capacitance_C) +
                current_A / params.rc_capacitance_C};
}

} // namespace packflow
