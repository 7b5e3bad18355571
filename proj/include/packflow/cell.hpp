#pragma once

#include <span>
#include <vector>

#include "packflow/errors.hpp"

namespace packflow {

/// Polynomial in the state of charge, coefficients stored highest degree
/// first. Evaluation uses Horner's scheme.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs_highest_first);

    static Polynomial constant(double value) { return Polynomial({value}); }

    double eval(double z) const noexcept;

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coefficients() const noexcept { return coeffs_; }

    bool operator==(const Polynomial&) const = default;

private:
    std::vector<double> coeffs_;
};

struct SocBounds {
    double lo = 0.0;
    double hi = 1.0;
    bool contains(double z) const noexcept { return z >= lo && z <= hi; }
    bool operator==(const SocBounds&) const = default;
};

/// Equivalent-circuit parameters of one cell: charge capacity, a single RC
/// pair whose resistance depends on SoC, an SoC-dependent series resistance
/// and the open-circuit voltage curve.
struct CellParameters {
    double capacity_As = 0.0;      // ampere-seconds; config files carry Ah
    double rc_capacitance_C = 0.0; // farads
    Polynomial rc_resistance_F;    // ohms, evaluated at SoC
    Polynomial series_resistance_r; // ohms, evaluated at SoC
    Polynomial ocv;                // volts, evaluated at SoC
    SocBounds soc_bounds;

    double capacity_Ah() const noexcept { return capacity_As / 3600.0; }

    /// Checks positivity of Q and C plus sign constraints of r(z) and F(z)
    /// over soc_bounds (sampled on a fine grid). Throws ValidationError.
    void validate() const;

    bool operator==(const CellParameters&) const = default;
};

/// State of one cell: state of charge and RC relaxation voltage.
struct CellState {
    double soc_z = 0.0;
    double relaxation_w = 0.0; // volts
    bool operator==(const CellState&) const = default;
};

struct CellDerivative {
    double dz_dt = 0.0; // 1/s
    double dw_dt = 0.0; // V/s
};

/// State-dependent part of the cell voltage, w + OCV(z). Excludes the ohmic
/// term r(z)*i, which belongs to the branch solve.
double state_voltage(const CellParameters& params, const CellState& state) noexcept;

/// Right-hand side of the cell ODE for a given branch current.
/// Positive current charges the cell. Throws NonpositiveRCResistance when
/// F(z) <= 0, i.e. the parameterization is invalid at this SoC.
CellDerivative cell_derivative(const CellParameters& params, const CellState& state,
                               double current_A);

} // namespace packflow
