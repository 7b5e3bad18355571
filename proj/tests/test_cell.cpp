#include <doctest.h>

#include <numeric>
#include <random>

#include "packflow/cell.hpp"
#include "test_support.hpp"

using namespace packflow;
using namespace packflow::test;

TEST_SUITE_BEGIN("cell");

TEST_CASE("polynomial: constant") {
    CHECK(Polynomial({1.0}).eval(0.5) == 1.0);
    CHECK(Polynomial::constant(0.0393).eval(0.0) == 0.0393);
    CHECK(Polynomial().eval(7.0) == 0.0);
}

TEST_CASE("polynomial: table values at the interval ends") {
    const CellParameters nmc = make_nmc_cell();
    // OCV at full charge reduces to the plain coefficient sum.
    const auto coeffs = nmc.ocv.coefficients();
    const double sum = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
    CHECK(nmc.ocv.eval(1.0) == doctest::Approx(sum).epsilon(1e-12));
    CHECK(nmc.series_resistance_r.eval(0.0) == doctest::Approx(0.0393).epsilon(1e-12));
}

TEST_CASE("polynomial: Horner agrees with naive power-sum evaluation") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> coeff(-5.0, 5.0);
    std::uniform_real_distribution<double> arg(-2.0, 2.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t deg = rng() % 9;
        std::vector<double> coeffs(deg + 1);
        for (double& c : coeffs) c = coeff(rng);
        const Polynomial p(coeffs);
        const double z = arg(rng);
        const double expected = naive_poly_eval(coeffs, z);
        CHECK(std::abs(p.eval(z) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("state_voltage: relaxation plus OCV, no ohmic term") {
    CellParameters cell = make_lfp_cell();
    cell.ocv = Polynomial::constant(3.3);
    CHECK(state_voltage(cell, {0.5, 0.0}) == 3.3);
    cell.ocv = Polynomial::constant(4.0);
    CHECK(state_voltage(cell, {0.5, 0.05}) == doctest::Approx(4.05).epsilon(1e-15));

    const CellParameters nmc = make_nmc_cell();
    CHECK(state_voltage(nmc, {1.0, 0.0}) == doctest::Approx(nmc.ocv.eval(1.0)).epsilon(1e-15));
}

TEST_CASE("cell_derivative: equilibrium and unit consistency") {
    const CellParameters lfp = make_lfp_cell();
    const CellDerivative eq = cell_derivative(lfp, {0.5, 0.0}, 0.0);
    CHECK(eq.dz_dt == 0.0);
    CHECK(eq.dw_dt == 0.0);

    // 1 A into a 1 Ah cell moves SoC at 1/3600 per second.
    CellParameters unit = make_lfp_cell();
    unit.capacity_As = 3600.0;
    CHECK(cell_derivative(unit, {0.2, 0.0}, 1.0).dz_dt == doctest::Approx(1.0 / 3600.0));
}

TEST_CASE("cell_derivative: table cell at 1C against direct evaluation") {
    const CellParameters nmc = make_nmc_cell();
    const double f_05 = naive_poly_eval(nmc.rc_resistance_F.coefficients(), 0.5);
    const CellDerivative d = cell_derivative(nmc, {0.5, 0.01}, 4.952);
    CHECK(d.dw_dt ==
          doctest::Approx(-0.01 / (f_05 * 2913.1) + 4.952 / 2913.1).epsilon(1e-12));
    CHECK(d.dz_dt == doctest::Approx(4.952 / (4.952 * 3600.0)).epsilon(1e-12));

    // Cross-check dw/dt with a forward difference of the exact solution at
    // frozen F (the SoC barely moves over one millisecond).
    const double dt = 1e-3;
    const double w_next = exact_relaxation(0.01, 4.952, f_05, 2913.1, dt);
    CHECK(d.dw_dt == doctest::Approx((w_next - 0.01) / dt).epsilon(1e-6));
}

TEST_CASE("cell_derivative: charge-positive sign convention") {
    const CellParameters lfp = make_lfp_cell();
    CHECK(cell_derivative(lfp, {0.5, 0.0}, 2.6).dz_dt > 0.0);
    CHECK(cell_derivative(lfp, {0.5, 0.0}, -2.6).dz_dt < 0.0);
}

TEST_CASE("cell_derivative: rejects nonpositive RC resistance") {
    const CellParameters nmc = make_nmc_cell();
    // The identified F(z) crosses zero near z = 0.8266.
    CHECK(nmc.rc_resistance_F.eval(0.9) < 0.0);
    CHECK_THROWS_AS((void)cell_derivative(nmc, {0.9, 0.0}, 1.0), NonpositiveRCResistance);
}

TEST_CASE("validate: rejects bad parameterizations") {
    CellParameters cell = make_lfp_cell();
    CHECK_NOTHROW(cell.validate());

    CellParameters bad_q = cell;
    bad_q.capacity_As = 0.0;
    CHECK_THROWS_AS(bad_q.validate(), ValidationError);

    CellParameters bad_f = cell;
    bad_f.rc_resistance_F = Polynomial::constant(-0.01);
    CHECK_THROWS_AS(bad_f.validate(), ValidationError);

    // The table cell is only valid below the F zero crossing.
    CellParameters nmc = make_nmc_cell();
    CHECK_NOTHROW(nmc.validate());
    nmc.soc_bounds = {0.0, 1.0};
    CHECK_THROWS_AS(nmc.validate(), ValidationError);
}

TEST_SUITE_END();
