#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "packflow/cell.hpp"
#include "packflow/kernels.hpp"
#include "packflow/solver.hpp"

// Time integration of the pack: at every right-hand-side evaluation the
// branch currents are re-solved from the current states (resistances
// re-evaluated at the stage SoC), so the algebraic constraint holds at each
// evaluation point rather than being frozen per step.

namespace packflow {

enum class SolverMode { analytical_no_r, analytical_with_r, dense_per_step };

enum class IntegratorMethod { rk4_fixed, rk45_adaptive };

struct IntegratorSettings {
    IntegratorMethod method = IntegratorMethod::rk4_fixed;
    double dt = 1.0;      // fixed step, seconds
    double t_end = 0.0;   // seconds
    // rk45-adaptive only:
    double rtol = 1e-8;
    double atol = 1e-10;
    double dt_min = 1e-6;
    double dt_max = 60.0;
    std::size_t output_every = 1; // store every k-th accepted step

    void validate() const;
    bool operator==(const IntegratorSettings&) const = default;
};

enum class SocPolicy { abort_run, clamp_and_warn };

struct PackLimits {
    SocPolicy soc_policy = SocPolicy::abort_run;
    std::optional<double> v_min; // terminate when pack voltage falls below
    std::optional<double> v_max; // terminate when pack voltage rises above
    bool operator==(const PackLimits&) const = default;
};

struct PackConfig {
    std::vector<CellParameters> cells;
    std::vector<double> interconnect_R; // ohms, size n-1
    SolverMode solver_mode = SolverMode::analytical_with_r;
    double scale_c = 0.5;
    IntegratorSettings integrator;
    std::vector<CellState> initial_states;
    PackLimits limits;
    std::optional<std::uint64_t> sampling_seed; // recorded when cells were sampled
    kernels::Exec exec = kernels::Exec::serial; // batch-kernel execution policy

    std::size_t size() const noexcept { return cells.size(); }
    void validate() const;
    bool operator==(const PackConfig&) const = default;
};

/// Applied pack current over time. Zero-order hold extends past the last
/// breakpoint; linear interpolation does not.
struct CurrentProfile {
    enum class Interpolation { zero_order_hold, linear };

    std::vector<std::pair<double, double>> breakpoints; // (t_s, I_A), t strictly increasing from 0
    Interpolation interpolation = Interpolation::zero_order_hold;

    void validate() const; // EmptyProfile / NonMonotoneTime
    bool covers(double t_end) const noexcept;
    double current_at(double t) const;
    /// Exact integral of I dt over [0, t] for conservation checks.
    double integral(double t) const;
    /// Breakpoint times inside (t, t_end], used to align integrator steps.
    double next_breakpoint_after(double t) const;
};

struct PackState {
    std::vector<CellState> cells;
    std::size_t size() const noexcept { return cells.size(); }
};

struct StepDiagnostics {
    double beta2 = 0.0;
    double psi2 = 0.0;
    double kcl_residual = 0.0;
    double max_kvl_residual = 0.0;
};

struct SimulationTrace {
    std::size_t n_cells = 0;
    std::vector<double> times;
    std::vector<double> applied_I;
    std::vector<double> pack_voltage;
    // step-major, sample s and cell k at [s * n_cells + k]
    std::vector<double> currents;
    std::vector<double> soc;
    std::vector<double> relaxation;
    std::vector<double> voltage; // full cell voltage vbar + r*i
    std::vector<StepDiagnostics> diagnostics;
    std::string termination_reason = "completed"; // or voltage_cutoff / soc_out_of_bounds
    std::optional<std::uint64_t> sampling_seed;
    std::size_t clamp_warnings = 0;

    std::size_t samples() const noexcept { return times.size(); }
    double at(const std::vector<double>& series, std::size_t sample, std::size_t cell) const {
        return series[sample * n_cells + cell];
    }
};

/// Branch solve at a given pack state with resistances evaluated at the
/// current SoC. This is the single evaluation point shared by all modes.
BranchSolution solve_branch_currents(const PackConfig& config, const PackState& state,
                                     double applied_I);

/// One fixed RK4 step; every stage re-solves the branch currents. Returns the
/// advanced state plus the branch solution at the step's starting state.
std::pair<PackState, BranchSolution> step(const PackConfig& config, const PackState& state,
                                          const CurrentProfile& profile, double t, double dt);

/// Pack terminal voltage: branch 1 connects directly to the terminals, so
/// v = vbar_1 + r_1(z_1) * i_1. For zero interconnection resistance this
/// equals every cell's voltage up to the solver residual.
double pack_voltage(const PackConfig& config, const PackState& state,
                    const BranchSolution& solution);

SimulationTrace simulate(const PackConfig& config, const CurrentProfile& profile);

struct BenchmarkEntry {
    std::size_t n = 0;
    SolverMode mode = SolverMode::analytical_with_r;
    double median_s = 0.0;     // simulation wall time over repeats
    double mean_s = 0.0;
    double per_solve_us = 0.0; // single branch-solve, isolated from integration
};

struct BenchmarkTable {
    std::vector<BenchmarkEntry> entries;
    double slope_analytical = 0.0; // log-log slope of per-solve time vs n
    double slope_dense = 0.0;
    int repeats = 0;
    int threads = 1;
};

/// Times analytical-with-R against dense-per-step branch solves on packs of
/// the given sizes, built by replicating the base config's cells, states and
/// interconnection resistances. Before timing, verifies that short
/// simulations in both modes agree to 1e-8 on every stored current (throws
/// ValidationError otherwise). Timing runs are sequential.
BenchmarkTable benchmark_solvers(std::span<const std::size_t> n_list, int repeats,
                                 const CurrentProfile& profile, const PackConfig& base,
                                 double sim_t_end = 30.0);

/// | sum_k Q_k dz_k - integral of I dt | for conservation checks.
double charge_conservation_error(const PackConfig& config, const SimulationTrace& trace,
                                 const CurrentProfile& profile);

std::string to_string(SolverMode mode);
SolverMode solver_mode_from_string(const std::string& name);
std::string to_string(IntegratorMethod method);
IntegratorMethod integrator_method_from_string(const std::string& name);

} // namespace packflow
