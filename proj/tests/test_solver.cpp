#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "packflow/solver.hpp"
#include "test_support.hpp"

using namespace packflow;
using namespace packflow::test;

TEST_SUITE_BEGIN("solver");

namespace {

double max_current_mismatch(std::span<const double> got, std::span<const double> want) {
    double worst = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k)
        worst = std::max(worst,
                         std::abs(got[k] - want[k]) / std::max(1.0, std::abs(want[k])));
    return worst;
}

} // namespace

TEST_CASE("a22 without interconnects: shape and reference row pattern") {
    SUBCASE("single cell") {
        PackResistances res{{0.02}, {}};
        const DenseSystem sys = build_a22_no_interconnect(res, std::vector<double>{3.3}, 5.0);
        CHECK(sys.n == 1);
        CHECK(sys.a == std::vector<double>{1.0});
        CHECK(sys.q == std::vector<double>{5.0});
    }
    SUBCASE("two cells") {
        PackResistances res{{0.03, 0.03}, {0.0}};
        const DenseSystem sys =
            build_a22_no_interconnect(res, std::vector<double>{3.3, 3.3}, 2.0);
        CHECK(sys.a == std::vector<double>{1.0, 1.0, 0.03, -0.03});
    }
    SUBCASE("three cells: ones on top, r_1 column, -r_k diagonal") {
        PackResistances res{{0.02, 0.03, 0.06}, {0.0, 0.0}};
        const std::vector<double> vbar = {3.30, 3.31, 3.29};
        const DenseSystem sys = build_a22_no_interconnect(res, vbar, 5.0);
        CHECK(sys.a == std::vector<double>{1.0, 1.0, 1.0,      //
                                           0.02, -0.03, 0.0,   //
                                           0.02, 0.0, -0.06});
        CHECK(sys.q[0] == 5.0);
        CHECK(sys.q[1] == doctest::Approx(0.01).epsilon(1e-12));
        CHECK(sys.q[2] == doctest::Approx(-0.01).epsilon(1e-12));
    }
}

TEST_CASE("a22 with interconnects: banded rows plus busbar fill") {
    SUBCASE("two cells") {
        PackResistances res{{0.01, 0.02}, {0.005}};
        const DenseSystem sys =
            build_a22_interconnect(res, std::vector<double>{3.3, 3.2}, 1.0);
        CHECK(sys.a == std::vector<double>{1.0, 1.0, 0.01, -0.025});
        CHECK(sys.q[1] == doctest::Approx(-0.1).epsilon(1e-12));
    }
    SUBCASE("three cells") {
        PackResistances res{{0.01, 0.02, 0.03}, {0.004, 0.005}};
        const DenseSystem sys =
            build_a22_interconnect(res, std::vector<double>{3.3, 3.3, 3.3}, 1.0);
        const std::vector<double> want = {1.0, 1.0,           1.0,    //
                                          0.01, -(0.02 + 0.004), -0.004, //
                                          0.0,  0.02,          -(0.03 + 0.005)};
        REQUIRE(sys.a.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i)
            CHECK(sys.a[i] == doctest::Approx(want[i]).epsilon(1e-14));
    }
    SUBCASE("with all R zero both formulations solve identically") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 20; ++trial) {
            RandomPack p = draw_section_v_pack(rng);
            std::fill(p.res.interconnect_R.begin(), p.res.interconnect_R.end(), 0.0);
            const auto ref = solve_dense_oracle(
                build_a22_no_interconnect(p.res, p.vbar, p.applied_I));
            const auto chained = solve_dense_oracle(
                build_a22_interconnect(p.res, p.vbar, p.applied_I));
            CHECK(max_current_mismatch(chained, ref) <= 1e-9);
        }
    }
}

TEST_CASE("solve_no_interconnect: symmetry, single cell, oracle match") {
    SUBCASE("identical cells split evenly") {
        PackResistances res{std::vector<double>(6, 0.0291), std::vector<double>(5, 0.0)};
        const std::vector<double> vbar(6, 3.31);
        const BranchSolution sol = solve_no_interconnect(res, vbar, 13.0);
        for (double i : sol.currents)
            CHECK(i == doctest::Approx(13.0 / 6.0).epsilon(1e-12));
        CHECK(sol.current_sums.front() == doctest::Approx(13.0).epsilon(1e-12));
    }
    SUBCASE("single cell carries everything") {
        PackResistances res{{0.02}, {}};
        CHECK(solve_no_interconnect(res, std::vector<double>{3.3}, -7.5).currents[0] == -7.5);
    }
    SUBCASE("three unequal branches against the dense oracle") {
        PackResistances res{{0.02, 0.03, 0.06}, {0.0, 0.0}};
        const std::vector<double> vbar = {3.30, 3.31, 3.29};
        const BranchSolution sol = solve_no_interconnect(res, vbar, 5.0);
        // Hand-reduced: phi = (sum dv/r + I)/sum(1/r), i_j = (phi - dv_j)/r_j.
        CHECK(sol.currents[0] == doctest::Approx(31.0 / 12.0).epsilon(1e-12));
        CHECK(sol.currents[1] == doctest::Approx(25.0 / 18.0).epsilon(1e-12));
        CHECK(sol.currents[2] == doctest::Approx(37.0 / 36.0).epsilon(1e-12));
        const auto oracle =
            solve_dense_oracle(build_a22_no_interconnect(res, vbar, 5.0));
        CHECK(max_current_mismatch(sol.currents, oracle) <= 1e-10);
    }
    SUBCASE("zero series resistance is rejected") {
        PackResistances res{{0.0, 0.03}, {0.0}};
        CHECK_THROWS_AS(
            (void)solve_no_interconnect(res, std::vector<double>{3.3, 3.3}, 1.0),
            ZeroUpstreamResistance);
    }
}

TEST_CASE("local coefficients: ratios and error path") {
    SUBCASE("identical cells") {
        PackResistances res{std::vector<double>(4, 0.03), std::vector<double>(3, 0.0)};
        const LocalCoefficients c = compute_local_params(res, std::vector<double>(4, 3.3));
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(c.theta[j] == 1.0);
            CHECK(c.omega[j] == 0.0);
            CHECK(c.alpha[j] == 2.0);
            CHECK(c.rho[j] == 0.0);
        }
    }
    SUBCASE("direct ratios") {
        PackResistances res{{0.02, 0.04}, {0.01}};
        const LocalCoefficients c = compute_local_params(res, std::vector<double>{3.3, 3.3});
        CHECK(c.theta[0] == doctest::Approx(2.0));
        CHECK(c.omega[0] == doctest::Approx(0.5));
        CHECK(c.alpha[0] == doctest::Approx(3.5));
    }
    SUBCASE("alpha identity holds on random packs") {
        std::mt19937_64 rng(22);
        for (int trial = 0; trial < 30; ++trial) {
            const RandomPack p = draw_section_v_pack(rng);
            const LocalCoefficients c = compute_local_params(p.res, p.vbar);
            for (std::size_t j = 0; j < c.theta.size(); ++j)
                CHECK(c.alpha[j] == 1.0 + c.theta[j] + c.omega[j]);
        }
    }
    SUBCASE("zero upstream resistance") {
        PackResistances res{{0.02, 0.0, 0.04}, {0.0, 0.0}};
        CHECK_THROWS_AS((void)compute_local_params(res, std::vector<double>(3, 3.3)),
                        ZeroUpstreamResistance);
    }
}

TEST_CASE("raw recurrences: anchors, growth, overflow flag") {
    SUBCASE("two identical cells") {
        PackResistances res{{0.03, 0.03}, {0.0}};
        const RawSequences seq =
            backward_recurrences_raw(compute_local_params(res, std::vector<double>(2, 3.3)));
        CHECK(seq.beta.front() == doctest::Approx(2.0)); // beta_2 = alpha_2
        CHECK(seq.f.front() == 0.0);
        CHECK(seq.beta.back() == 1.0);
        CHECK_FALSE(seq.overflow);
    }
    SUBCASE("beta_2 equals n for identical cells without busbars") {
        for (std::size_t n : {3u, 10u, 57u, 200u}) {
            PackResistances res{std::vector<double>(n, 0.0291),
                                std::vector<double>(n - 1, 0.0)};
            const RawSequences seq =
                backward_recurrences_raw(compute_local_params(res, std::vector<double>(n, 3.3)));
            CHECK(seq.beta.front() ==
                  doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
        }
    }
    SUBCASE("f grows exponentially towards the front of a resistive pack") {
        const std::size_t n = 15;
        PackResistances res{std::vector<double>(n, 0.0291),
                            std::vector<double>(n - 1, 0.0291)};
        std::vector<double> vbar(n);
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> z(0.2, 0.8);
        for (double& v : vbar) v = lfp_ocv().eval(z(rng));
        const RawSequences seq = backward_recurrences_raw(compute_local_params(res, vbar));
        // index j = k - 2: f_2, f_8, f_14
        CHECK(std::abs(seq.f[0]) > std::abs(seq.f[6]));
        CHECK(std::abs(seq.f[6]) > std::abs(seq.f[12]));
        CHECK(std::abs(seq.f[0]) > 100.0 * std::abs(seq.f[12]));
    }
    SUBCASE("overflow flag on an extreme pack") {
        const std::size_t n = 200;
        PackResistances res{std::vector<double>(n, 1e-3),
                            std::vector<double>(n - 1, 31.5e-3)};
        const RawSequences seq =
            backward_recurrences_raw(compute_local_params(res, std::vector<double>(n, 3.3)));
        CHECK(seq.overflow);
        CHECK(std::isfinite(seq.beta.front()));
        CHECK(std::abs(seq.beta.front()) > 1e300);
    }
}

TEST_CASE("scaled recurrences: degenerate scale, round trip, underflow flag") {
    SUBCASE("c = 1 reproduces the raw sequences") {
        std::mt19937_64 rng(24);
        const RandomPack p = draw_similar_state_pack(rng, 20, 1e-3);
        const LocalCoefficients c = compute_local_params(p.res, p.vbar);
        const RawSequences raw = backward_recurrences_raw(c);
        const ScaledSequences scaled = backward_recurrences_scaled(c, 1.0);
        for (std::size_t j = 0; j < raw.beta.size(); ++j) {
            CHECK(scaled.psi[j] == doctest::Approx(raw.beta[j]).epsilon(1e-15));
            CHECK(scaled.g[j] == doctest::Approx(raw.f[j]).epsilon(1e-15));
        }
    }
    SUBCASE("psi_k = c^{n+1-k} beta_k and g_k = c^{n+1-k} f_k") {
        std::mt19937_64 rng(25);
        for (int trial = 0; trial < 50; ++trial) {
            RandomPack p = draw_similar_state_pack(rng, 30, 1e-3);
            const std::size_t n = p.res.size();
            const LocalCoefficients c = compute_local_params(p.res, p.vbar);
            const RawSequences raw = backward_recurrences_raw(c);
            const ScaledSequences scaled = backward_recurrences_scaled(c, 0.5);
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t k = j + 2;
                const double pw = std::pow(0.5, static_cast<double>(n + 1 - k));
                CHECK(std::abs(pw * raw.f[j] - scaled.g[j]) <=
                      1e-9 * std::max(1e-300, std::abs(scaled.g[j])));
                CHECK(std::abs(pw * raw.beta[j] - scaled.psi[j]) <=
                      1e-9 * std::abs(scaled.psi[j]));
            }
        }
    }
    SUBCASE("recovery underflow is flagged for very large packs") {
        const std::size_t n = 1600;
        PackResistances res{std::vector<double>(n, 0.0291), std::vector<double>(n - 1, 0.0)};
        const ScaledSequences scaled = backward_recurrences_scaled(
            compute_local_params(res, std::vector<double>(n, 3.3)), 0.5);
        CHECK(scaled.recovery_underflow);
    }
    SUBCASE("invalid scale constants are rejected") {
        PackResistances res{{0.03, 0.03}, {0.0}};
        const LocalCoefficients c = compute_local_params(res, std::vector<double>(2, 3.3));
        CHECK_THROWS_AS((void)backward_recurrences_scaled(c, 0.0), ValidationError);
        CHECK_THROWS_AS((void)backward_recurrences_scaled(c, 1.5), ValidationError);
    }
    SUBCASE("diagnostics bundle matches the solve's reported values") {
        PackResistances res{{0.02, 0.04, 0.03}, {0.002, 0.001}};
        const std::vector<double> vbar = {3.31, 3.29, 3.30};
        const RecurrenceDiagnostics diag = recurrence_diagnostics(res, vbar, 0.5);
        const BranchSolution sol = solve_with_interconnect(res, vbar, 6.0, 0.5);
        CHECK(diag.scaled.psi.front() == sol.psi2);
        CHECK(diag.scaled.scale_c == sol.scale_c);
        CHECK(diag.coeffs.theta.size() == 2);
    }
}

TEST_CASE("solve_with_interconnect: hand case and basic structure") {
    PackResistances res{{0.03, 0.03}, {0.03}};
    const BranchSolution sol =
        solve_with_interconnect(res, std::vector<double>{3.3, 3.3}, 2.0);
    CHECK(sol.currents[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(sol.currents[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(sol.current_sums[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sol.current_sums[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(sol.beta2 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sol.kcl_residual <= residual_tolerance(2.0));
}

TEST_CASE("solve_with_interconnect: current sums satisfy their defining relations") {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 50; ++trial) {
        const RandomPack p = draw_section_v_pack(rng);
        const BranchSolution sol = solve_with_interconnect(p.res, p.vbar, p.applied_I);
        const std::size_t n = p.res.size();
        const double tol = 1e-9 * std::max(1.0, std::abs(p.applied_I));
        CHECK(std::abs(sol.current_sums[0] - p.applied_I) <= tol);
        CHECK(sol.current_sums[n - 1] == sol.currents[n - 1]);
        for (std::size_t k = 0; k + 1 < n; ++k)
            CHECK(std::abs(sol.current_sums[k] - sol.current_sums[k + 1] - sol.currents[k]) <=
                  1e-9 * std::max(1.0, std::abs(sol.currents[k])));
    }
}

TEST_CASE("solve_with_interconnect: front cells draw more in a uniform resistive pack") {
    const std::size_t n = 10;
    PackResistances res{std::vector<double>(n, 0.0291), std::vector<double>(n - 1, 1e-3)};
    const std::vector<double> vbar(n, 3.31);
    const BranchSolution sol = solve_with_interconnect(res, vbar, 26.0);
    for (std::size_t k = 0; k + 1 < n; ++k) CHECK(sol.currents[k] > sol.currents[k + 1]);
    const auto oracle = solve_dense_oracle(build_a22_interconnect(res, vbar, 26.0));
    CHECK(max_current_mismatch(sol.currents, oracle) <= 1e-9);
}

TEST_CASE("oracle equivalence on experiment-scale packs") {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 400; ++trial) {
        const RandomPack p = draw_section_v_pack(rng);
        const BranchSolution sol = solve_with_interconnect(p.res, p.vbar, p.applied_I);
        const auto oracle =
            solve_dense_oracle(build_a22_interconnect(p.res, p.vbar, p.applied_I));
        CHECK(max_current_mismatch(sol.currents, oracle) <= 1e-8);
    }
}

TEST_CASE("full parameter box: never silently wrong") {
    // Unbounded draws can push the recurrence growth past what double
    // precision can carry (the raw sequences overflow around 1e308 and the
    // dominant-mode roundoff amplifies at the same rate). The contract is:
    // every returned solution is oracle-grade, everything else raises
    // KirchhoffResidualExceeded, and mild packs never raise.
    std::mt19937_64 rng(28);
    int returned = 0, refused = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const RandomPack p = draw_full_range_pack(rng);
        const RawSequences raw = backward_recurrences_raw(compute_local_params(p.res, p.vbar));
        const double growth = std::abs(raw.beta.front());
        try {
            const BranchSolution sol = solve_with_interconnect(p.res, p.vbar, p.applied_I);
            ++returned;
            if (growth <= 1e4) {
                const auto oracle =
                    solve_dense_oracle(build_a22_interconnect(p.res, p.vbar, p.applied_I));
                CHECK(max_current_mismatch(sol.currents, oracle) <= 1e-8);
            }
        } catch (const KirchhoffResidualExceeded&) {
            ++refused;
            CHECK((growth > 1e6 || !std::isfinite(growth)));
        }
    }
    CHECK(returned > 0);
    CHECK(refused > 0); // the box does contain packs beyond double precision
}

TEST_CASE("limit consistency: with-R solver at R = 0 matches the closed form") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        RandomPack p = draw_section_v_pack(rng);
        std::fill(p.res.interconnect_R.begin(), p.res.interconnect_R.end(), 0.0);
        const BranchSolution with_r = solve_with_interconnect(p.res, p.vbar, p.applied_I);
        const BranchSolution no_r = solve_no_interconnect(p.res, p.vbar, p.applied_I);
        CHECK(max_current_mismatch(with_r.currents, no_r.currents) <= 1e-9);

        // A residual 1e-12 ohm busbar is a different circuit whose solution
        // moves away from the ideal one by O(n R I / r), a few 1e-6 at the
        // largest tested sizes; the tolerance covers that physical gap, not
        // just roundoff.
        std::fill(p.res.interconnect_R.begin(), p.res.interconnect_R.end(), 1e-12);
        const BranchSolution near_r = solve_with_interconnect(p.res, p.vbar, p.applied_I);
        CHECK(max_current_mismatch(near_r.currents, no_r.currents) <= 1e-5);
    }
}

TEST_CASE("scale invariance: currents do not depend on c") {
    std::mt19937_64 rng(30);
    for (int trial = 0; trial < 100; ++trial) {
        const RandomPack p = draw_similar_state_pack(rng, 50, 1e-3);
        const BranchSolution base = solve_with_interconnect(p.res, p.vbar, p.applied_I, 0.5);
        for (double c : {0.3, 0.9}) {
            const BranchSolution other =
                solve_with_interconnect(p.res, p.vbar, p.applied_I, c);
            CHECK(max_current_mismatch(other.currents, base.currents) <= 1e-10);
        }
    }
}

TEST_CASE("symmetry: identical cells, equal states, no busbars") {
    const std::size_t n = 24;
    PackResistances res{std::vector<double>(n, 0.0291), std::vector<double>(n - 1, 0.0)};
    const std::vector<double> vbar(n, 3.31);
    const BranchSolution sol = solve_with_interconnect(res, vbar, 52.0);
    for (double i : sol.currents)
        CHECK(std::abs(i - 52.0 / n) <= 1e-12 * (52.0 / n));
}

TEST_CASE("imbalance grows with the busbar-to-series ratio") {
    const std::size_t n = 10;
    const double r = 0.0291, I = 26.0;
    const std::vector<double> vbar(n, 3.31);
    double previous = -1.0;
    for (double ratio : {0.0, 0.1, 0.5, 1.0, 2.0}) {
        PackResistances res{std::vector<double>(n, r), std::vector<double>(n - 1, ratio * r)};
        const BranchSolution sol = solve_with_interconnect(res, vbar, I);
        const auto [lo, hi] = std::minmax_element(sol.currents.begin(), sol.currents.end());
        const double spread = (*hi - *lo) / (I / n);
        CHECK(spread >= previous);
        previous = spread;
        const auto oracle = solve_dense_oracle(build_a22_interconnect(res, vbar, I));
        CHECK(max_current_mismatch(sol.currents, oracle) <= 1e-9);
    }
}

TEST_CASE("degenerate cases: zero current, single branch, underflow") {
    SUBCASE("zero applied current at equal states gives zero currents") {
        PackResistances res{std::vector<double>(5, 0.0291), std::vector<double>(4, 1e-3)};
        const BranchSolution sol =
            solve_with_interconnect(res, std::vector<double>(5, 3.3), 0.0);
        for (double i : sol.currents) CHECK(i == 0.0);
    }
    SUBCASE("single branch passes the applied current through") {
        PackResistances res{{0.0291}, {}};
        CHECK(solve_with_interconnect(res, std::vector<double>{3.3}, 4.2).currents[0] == 4.2);
    }
    SUBCASE("scale underflow raises UnsolvablePack") {
        const std::size_t n = 1600;
        PackResistances res{std::vector<double>(n, 0.0291), std::vector<double>(n - 1, 0.0)};
        CHECK_THROWS_AS(
            (void)solve_with_interconnect(res, std::vector<double>(n, 3.3), 10.0),
            UnsolvablePack);
    }
    SUBCASE("n = 1000 still works through the scaled ratio") {
        const std::size_t n = 1000;
        PackResistances res{std::vector<double>(n, 0.0291), std::vector<double>(n - 1, 0.0)};
        const BranchSolution sol =
            solve_with_interconnect(res, std::vector<double>(n, 3.3), 100.0);
        CHECK(sol.currents[0] == doctest::Approx(0.1).epsilon(1e-10));
        CHECK(sol.currents[n - 1] == doctest::Approx(0.1).epsilon(1e-10));
    }
}

TEST_CASE("residuals: zero at the oracle solution, linear in perturbations") {
    PackResistances res{{0.02, 0.03, 0.06}, {0.004, 0.002}};
    const std::vector<double> vbar = {3.30, 3.31, 3.29};
    const double I = 5.0;
    std::vector<double> sol = solve_dense_oracle(build_a22_interconnect(res, vbar, I));

    Residuals r0 = residuals(res, vbar, I, sol);
    CHECK(r0.kcl <= 1e-12 * std::max(1.0, std::abs(I)));
    CHECK(r0.max_kvl() <= 1e-12);

    const double eps = 1e-3;
    sol[0] += eps;
    Residuals r1 = residuals(res, vbar, I, sol);
    CHECK(r1.kcl == doctest::Approx(eps).epsilon(1e-9));
    CHECK(r1.kvl[0] == doctest::Approx(res.series_r[0] * eps).epsilon(1e-9));

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const RandomPack p = draw_section_v_pack(rng);
        const auto oracle =
            solve_dense_oracle(build_a22_interconnect(p.res, p.vbar, p.applied_I));
        const Residuals r = residuals(p.res, p.vbar, p.applied_I, oracle);
        const double scale = std::max(1.0, std::abs(p.applied_I));
        CHECK(r.kcl <= 1e-10 * scale);
        CHECK(r.max_kvl() <= 1e-10 * scale);
    }
}

TEST_SUITE_END();
