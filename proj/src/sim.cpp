#include "packflow/sim.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace packflow {

void IntegratorSettings::validate() const {
    if (!(t_end >= 0.0)) throw ValidationError("integrator.t_end must be >= 0");
    if (method == IntegratorMethod::rk4_fixed) {
        if (!(dt > 0.0)) throw ValidationError("integrator.dt must be > 0");
    } else {
        if (!(rtol > 0.0) || !(atol > 0.0))
            throw ValidationError("integrator rtol and atol must be > 0");
        if (!(dt_min > 0.0) || !(dt_max >= dt_min))
            throw ValidationError("integrator needs 0 < dt_min <= dt_max");
        if (!(dt > 0.0)) throw ValidationError("integrator.dt (initial step) must be > 0");
    }
    if (output_every == 0) throw ValidationError("integrator.output_every must be >= 1");
}

void PackConfig::validate() const {
    if (cells.empty()) throw ValidationError("config needs at least one cell");
    for (std::size_t k = 0; k < cells.size(); ++k) {
        try {
            cells[k].validate();
        } catch (const ValidationError& e) {
            throw ValidationError("cell " + std::to_string(k + 1) + ": " + e.what());
        }
    }
    const std::size_t n = cells.size();
    if (interconnect_R.empty()) {
        if (solver_mode != SolverMode::analytical_no_r && n > 1)
            throw ValidationError("interconnect_R may only be omitted in analytical-no-R mode");
    } else if (interconnect_R.size() != n - 1) {
        throw ValidationError("interconnect_R must have n-1 entries");
    }
    for (double R : interconnect_R) {
        if (!(R >= 0.0)) throw ValidationError("interconnection resistances must be >= 0");
        if (solver_mode == SolverMode::analytical_no_r && R != 0.0)
            throw ValidationError("analytical-no-R mode requires all interconnect_R == 0");
    }
    if (!(scale_c > 0.0) || scale_c > 1.0)
        throw ValidationError("scale_c must lie in (0, 1]");
    integrator.validate();
    if (initial_states.size() != n)
        throw ValidationError("initial_states must have one entry per cell");
    for (std::size_t k = 0; k < n; ++k)
        if (!cells[k].soc_bounds.contains(initial_states[k].soc_z))
            throw ValidationError("initial SoC of cell " + std::to_string(k + 1) +
                                  " outside soc_bounds");
}

void CurrentProfile::validate() const {
    if (breakpoints.empty()) throw EmptyProfile("profile has no breakpoints");
    if (breakpoints.front().first != 0.0)
        throw NonMonotoneTime("profile must start at t = 0");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i].first > breakpoints[i - 1].first))
            throw NonMonotoneTime("profile times must be strictly increasing");
}

bool CurrentProfile::covers(double t_end) const noexcept {
    if (breakpoints.empty()) return false;
    if (interpolation == Interpolation::zero_order_hold) return t_end >= breakpoints.front().first;
    return t_end <= breakpoints.back().first;
}

double CurrentProfile::current_at(double t) const {
    if (breakpoints.empty()) throw EmptyProfile("profile has no breakpoints");
    if (t < breakpoints.front().first) throw ProfileGap("profile does not cover t < 0");
    if (interpolation == Interpolation::zero_order_hold) {
        auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t,
                                   [](double v, const auto& bp) { return v < bp.first; });
        return std::prev(it)->second;
    }
    if (t > breakpoints.back().first)
        throw ProfileGap("linear profile ends at t = " + std::to_string(breakpoints.back().first));
    auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), t,
                               [](const auto& bp, double v) { return bp.first < v; });
    if (it->first == t) return it->second;
    const auto& hi = *it;
    const auto& lo = *std::prev(it);
    const double w = (t - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
}

double CurrentProfile::integral(double t) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size() && breakpoints[i].first < t; ++i) {
        const double t0 = breakpoints[i].first;
        const double t1 = std::min(breakpoints[i + 1].first, t);
        if (t1 <= t0) continue;
        if (interpolation == Interpolation::zero_order_hold) {
            acc += breakpoints[i].second * (t1 - t0);
        } else {
            const double i1 = current_at(t1);
            const double i0 = current_at(t0);
            acc += 0.5 * (i0 + i1) * (t1 - t0);
        }
    }
    const double t_last = breakpoints.back().first;
    if (t > t_last) {
        if (interpolation != Interpolation::zero_order_hold)
            throw ProfileGap("linear profile ends at t = " + std::to_string(t_last));
        acc += breakpoints.back().second * (t - t_last);
    }
    return acc;
}

double CurrentProfile::next_breakpoint_after(double t) const {
    for (const auto& bp : breakpoints)
        if (bp.first > t) return bp.first;
    return std::numeric_limits<double>::infinity();
}

namespace {

struct CellAlgebra {
    std::vector<double> vbar, series_r, rc_f;
};

void eval_algebra(const PackConfig& config, const PackState& state, CellAlgebra& out) {
    const std::size_t n = config.size();
    out.vbar.resize(n);
    out.series_r.resize(n);
    out.rc_f.resize(n);
    kernels::eval_cell_algebra(config.cells, state.cells, out.vbar, out.series_r, out.rc_f,
                               config.exec);
}

BranchSolution solve_from_algebra(const PackConfig& config, const CellAlgebra& alg,
                                  double applied_I) {
    const std::size_t n = config.size();
    PackResistances res;
    res.series_r = alg.series_r;
    res.interconnect_R = config.interconnect_R;
    if (res.interconnect_R.empty()) res.interconnect_R.assign(n > 0 ? n - 1 : 0, 0.0);

    switch (config.solver_mode) {
    case SolverMode::analytical_no_r:
        return solve_no_interconnect(res, alg.vbar, applied_I);
    case SolverMode::analytical_with_r:
        return solve_with_interconnect(res, alg.vbar, applied_I, config.scale_c);
    case SolverMode::dense_per_step: {
        const DenseSystem sys = build_a22_interconnect(res, alg.vbar, applied_I);
        BranchSolution sol;
        sol.currents = solve_dense_oracle(sys, config.exec);
        sol.current_sums.assign(n, 0.0);
        double acc = 0.0;
        for (std::size_t k = n; k-- > 0;) {
            acc += sol.currents[k];
            sol.current_sums[k] = acc;
        }
        sol.beta2 = std::numeric_limits<double>::quiet_NaN();
        sol.psi2 = std::numeric_limits<double>::quiet_NaN();
        Residuals resid = residuals(res, alg.vbar, applied_I, sol.currents);
        sol.kcl_residual = resid.kcl;
        sol.kvl_residuals = std::move(resid.kvl);
        return sol;
    }
    }
    throw ValidationError("unknown solver mode");
}

struct RhsResult {
    std::vector<CellDerivative> deriv;
};

void eval_rhs(const PackConfig& config, const PackState& state, double applied_I,
              CellAlgebra& scratch, RhsResult& out) {
    eval_algebra(config, state, scratch);
    const BranchSolution sol = solve_from_algebra(config, scratch, applied_I);
    out.deriv.resize(config.size());
    kernels::eval_derivatives(config.cells, state.cells, sol.currents, scratch.rc_f, out.deriv,
                              config.exec);
}

PackState advance_state(const PackState& base, std::span<const CellDerivative> k, double h) {
    PackState out = base;
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
        out.cells[i].soc_z += h * k[i].dz_dt;
        out.cells[i].relaxation_w += h * k[i].dw_dt;
    }
    return out;
}

double stage_current(const CurrentProfile& profile, double t_start, double t_stage) {
    // Steps are aligned to profile breakpoints, so a held profile is constant
    // within the step; sampling at the start avoids picking up the next
    // segment at the right endpoint.
    if (profile.interpolation == CurrentProfile::Interpolation::zero_order_hold)
        return profile.current_at(t_start);
    return profile.current_at(t_stage);
}

PackState rk4_step(const PackConfig& config, const PackState& state,
                   const CurrentProfile& profile, double t, double dt, CellAlgebra& scratch) {
    RhsResult k1, k2, k3, k4;
    eval_rhs(config, state, stage_current(profile, t, t), scratch, k1);
    eval_rhs(config, advance_state(state, k1.deriv, 0.5 * dt),
             stage_current(profile, t, t + 0.5 * dt), scratch, k2);
    eval_rhs(config, advance_state(state, k2.deriv, 0.5 * dt),
             stage_current(profile, t, t + 0.5 * dt), scratch, k3);
    eval_rhs(config, advance_state(state, k3.deriv, dt), stage_current(profile, t, t + dt),
             scratch, k4);

    PackState out = state;
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
        out.cells[i].soc_z += dt / 6.0 *
                              (k1.deriv[i].dz_dt + 2.0 * k2.deriv[i].dz_dt +
                               2.0 * k3.deriv[i].dz_dt + k4.deriv[i].dz_dt);
        out.cells[i].relaxation_w += dt / 6.0 *
                                     (k1.deriv[i].dw_dt + 2.0 * k2.deriv[i].dw_dt +
                                      2.0 * k3.deriv[i].dw_dt + k4.deriv[i].dw_dt);
    }
    return out;
}

// Dormand-Prince 5(4) tableau.
struct Dopri {
    static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    };
    static constexpr double b5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                                     -2187.0 / 6784, 11.0 / 84,  0.0};
    static constexpr double b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                     -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

struct AdaptiveResult {
    PackState state;
    double error_norm = 0.0;
};

AdaptiveResult rk45_attempt(const PackConfig& config, const PackState& state,
                            const CurrentProfile& profile, double t, double dt,
                            CellAlgebra& scratch) {
    const std::size_t n = config.size();
    std::array<RhsResult, 7> k;
    eval_rhs(config, state, stage_current(profile, t, t), scratch, k[0]);
    for (int s = 1; s < 7; ++s) {
        PackState stage = state;
        for (std::size_t i = 0; i < n; ++i) {
            double dz = 0.0, dw = 0.0;
            for (int p = 0; p < s; ++p) {
                dz += Dopri::a[s][p] * k[p].deriv[i].dz_dt;
                dw += Dopri::a[s][p] * k[p].deriv[i].dw_dt;
            }
            stage.cells[i].soc_z += dt * dz;
            stage.cells[i].relaxation_w += dt * dw;
        }
        eval_rhs(config, stage, stage_current(profile, t, t + Dopri::c[s] * dt), scratch, k[s]);
    }

    AdaptiveResult out;
    out.state = state;
    double err_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double z5 = 0.0, w5 = 0.0, z4 = 0.0, w4 = 0.0;
        for (int s = 0; s < 7; ++s) {
            z5 += Dopri::b5[s] * k[s].deriv[i].dz_dt;
            w5 += Dopri::b5[s] * k[s].deriv[i].dw_dt;
            z4 += Dopri::b4[s] * k[s].deriv[i].dz_dt;
            w4 += Dopri::b4[s] * k[s].deriv[i].dw_dt;
        }
        const double z_new = out.state.cells[i].soc_z + dt * z5;
        const double w_new = out.state.cells[i].relaxation_w + dt * w5;
        const double ez = dt * (z5 - z4);
        const double ew = dt * (w5 - w4);
        const auto& set = config.integrator;
        const double sz = set.atol + set.rtol * std::max(std::abs(out.state.cells[i].soc_z),
                                                         std::abs(z_new));
        const double sw = set.atol + set.rtol * std::max(std::abs(out.state.cells[i].relaxation_w),
                                                         std::abs(w_new));
        err_sq += (ez / sz) * (ez / sz) + (ew / sw) * (ew / sw);
        out.state.cells[i].soc_z = z_new;
        out.state.cells[i].relaxation_w = w_new;
    }
    out.error_norm = std::sqrt(err_sq / (2.0 * static_cast<double>(n)));
    return out;
}

} // namespace

BranchSolution solve_branch_currents(const PackConfig& config, const PackState& state,
                                     double applied_I) {
    CellAlgebra alg;
    eval_algebra(config, state, alg);
    return solve_from_algebra(config, alg, applied_I);
}

std::pair<PackState, BranchSolution> step(const PackConfig& config, const PackState& state,
                                          const CurrentProfile& profile, double t, double dt) {
    if (state.size() != config.size()) throw ValidationError("state size mismatch");
    if (!(dt > 0.0)) throw ValidationError("step needs dt > 0");
    CellAlgebra scratch;
    eval_algebra(config, state, scratch);
    BranchSolution at_start = solve_from_algebra(config, scratch, profile.current_at(t));
    PackState next = rk4_step(config, state, profile, t, dt, scratch);
    return {std::move(next), std::move(at_start)};
}

double pack_voltage(const PackConfig& config, const PackState& state,
                    const BranchSolution& solution) {
    const CellState& first = state.cells.front();
    return state_voltage(config.cells.front(), first) +
           config.cells.front().series_resistance_r.eval(first.soc_z) * solution.currents.front();
}

SimulationTrace simulate(const PackConfig& config, const CurrentProfile& profile) {
    config.validate();
    profile.validate();
    const auto& set = config.integrator;
    if (!profile.covers(set.t_end))
        throw ProfileGap("profile does not cover t_end = " + std::to_string(set.t_end));

    const std::size_t n = config.size();
    SimulationTrace trace;
    trace.n_cells = n;
    trace.sampling_seed = config.sampling_seed;

    PackState state{config.initial_states};
    CellAlgebra alg;
    double t = 0.0;
    double dt_next = set.dt;
    std::size_t steps_since_store = 0;

    auto store_row = [&](const BranchSolution& sol, const CellAlgebra& a, double applied) {
        trace.times.push_back(t);
        trace.applied_I.push_back(applied);
        for (std::size_t k = 0; k < n; ++k) {
            trace.currents.push_back(sol.currents[k]);
            trace.soc.push_back(state.cells[k].soc_z);
            trace.relaxation.push_back(state.cells[k].relaxation_w);
            trace.voltage.push_back(a.vbar[k] + a.series_r[k] * sol.currents[k]);
        }
        double max_kvl = 0.0;
        for (double v : sol.kvl_residuals) max_kvl = std::max(max_kvl, v);
        trace.diagnostics.push_back({sol.beta2, sol.psi2, sol.kcl_residual, max_kvl});
        trace.pack_voltage.push_back(a.vbar[0] + a.series_r[0] * sol.currents[0]);
    };

    const double t_eps = 1e-9 * std::max(1.0, set.t_end);
    while (true) {
        const double applied = profile.current_at(t);
        eval_algebra(config, state, alg);
        const BranchSolution sol = solve_from_algebra(config, alg, applied);

        const bool due = steps_since_store == 0;
        const double v_pack = alg.vbar[0] + alg.series_r[0] * sol.currents[0];
        const bool v_hit = (config.limits.v_max && v_pack >= *config.limits.v_max) ||
                           (config.limits.v_min && v_pack <= *config.limits.v_min);
        const bool done = t >= set.t_end - t_eps;

        if (due || v_hit || done) store_row(sol, alg, applied);

        if (v_hit) {
            trace.termination_reason = "voltage_cutoff";
            return trace;
        }
        if (done) {
            trace.termination_reason = "completed";
            return trace;
        }

        // Clip the step to the horizon and the next profile breakpoint so no
        // stage straddles a current discontinuity.
        const double limit = std::min(set.t_end, profile.next_breakpoint_after(t));
        double dt = std::min(dt_next, limit - t);

        PackState next;
        if (set.method == IntegratorMethod::rk4_fixed) {
            dt = std::min(set.dt, limit - t);
            next = rk4_step(config, state, profile, t, dt, alg);
        } else {
            while (true) {
                AdaptiveResult attempt = rk45_attempt(config, state, profile, t, dt, alg);
                if (attempt.error_norm <= 1.0 || dt <= set.dt_min) {
                    next = std::move(attempt.state);
                    double factor = attempt.error_norm > 0.0
                                        ? 0.9 * std::pow(attempt.error_norm, -0.2)
                                        : 5.0;
                    factor = std::clamp(factor, 0.2, 5.0);
                    dt_next = std::clamp(dt * factor, set.dt_min, set.dt_max);
                    break;
                }
                dt = std::max(set.dt_min, dt * std::clamp(0.9 * std::pow(attempt.error_norm, -0.2),
                                                          0.2, 1.0));
            }
        }

        bool soc_violation = false;
        for (std::size_t k = 0; k < n; ++k) {
            const SocBounds& b = config.cells[k].soc_bounds;
            double& z = next.cells[k].soc_z;
            if (!b.contains(z)) {
                if (config.limits.soc_policy == SocPolicy::abort_run) {
                    soc_violation = true;
                    break;
                }
                z = std::clamp(z, b.lo, b.hi);
                ++trace.clamp_warnings;
            }
        }
        if (soc_violation) {
            trace.termination_reason = "soc_out_of_bounds";
            if (trace.times.empty() || trace.times.back() != t) {
                eval_algebra(config, state, alg);
                const BranchSolution last = solve_from_algebra(config, alg, applied);
                store_row(last, alg, applied);
            }
            return trace;
        }

        state = std::move(next);
        t += dt;
        // Snap onto the clip target so roundoff cannot leave a sliver step.
        if (std::abs(limit - t) < 1e-12 * std::max(1.0, limit)) t = limit;
        ++steps_since_store;
        if (steps_since_store >= set.output_every) steps_since_store = 0;
    }
}

double charge_conservation_error(const PackConfig& config, const SimulationTrace& trace,
                                 const CurrentProfile& profile) {
    if (trace.samples() == 0) return 0.0;
    const std::size_t n = trace.n_cells;
    const std::size_t last = trace.samples() - 1;
    double moved = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        moved += config.cells[k].capacity_As * (trace.at(trace.soc, last, k) -
                                                trace.at(trace.soc, 0, k));
    return std::abs(moved - profile.integral(trace.times[last]));
}

namespace {

PackConfig benchmark_pack(const PackConfig& base, std::size_t n, SolverMode mode, double t_end) {
    const std::size_t m = base.size();
    PackConfig config;
    config.cells.reserve(n);
    config.initial_states.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        config.cells.push_back(base.cells[k % m]);
        config.initial_states.push_back(base.initial_states[k % m]);
    }
    config.interconnect_R.reserve(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k)
        config.interconnect_R.push_back(
            base.interconnect_R.empty() ? 0.0 : base.interconnect_R[k % base.interconnect_R.size()]);
    config.solver_mode = mode;
    config.scale_c = base.scale_c;
    config.integrator.method = IntegratorMethod::rk4_fixed;
    config.integrator.dt = base.integrator.dt;
    config.integrator.t_end = t_end;
    config.limits.soc_policy = base.limits.soc_policy;
    config.exec = kernels::Exec::serial; // timing stays sequential
    return config;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(points.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace

BenchmarkTable benchmark_solvers(std::span<const std::size_t> n_list, int repeats,
                                 const CurrentProfile& profile, const PackConfig& base,
                                 double sim_t_end) {
    using clock = std::chrono::steady_clock;
    if (repeats < 1) throw ValidationError("repeats must be >= 1");
    for (std::size_t n : n_list)
        if (n < 2) throw ValidationError("benchmark pack sizes must be >= 2");
    base.validate();

    BenchmarkTable table;
    table.repeats = repeats;
    table.threads = 1; // timing runs are sequential
    std::vector<std::pair<double, double>> pts_analytical, pts_dense;

    for (std::size_t n : n_list) {
        PackConfig analytical = benchmark_pack(base, n, SolverMode::analytical_with_r, sim_t_end);
        PackConfig dense = benchmark_pack(base, n, SolverMode::dense_per_step, sim_t_end);

        // Correctness gate before any timing; a few steps are enough to
        // exercise both modes against each other.
        PackConfig gate_a = analytical, gate_d = dense;
        gate_a.integrator.t_end = std::min(5.0 * analytical.integrator.dt, sim_t_end);
        gate_d.integrator.t_end = gate_a.integrator.t_end;
        const SimulationTrace ta = simulate(gate_a, profile);
        const SimulationTrace td = simulate(gate_d, profile);
        if (ta.samples() != td.samples())
            throw ValidationError("benchmark cross-check: traces differ in length");
        for (std::size_t i = 0; i < ta.currents.size(); ++i) {
            const double scale = std::max(1.0, std::abs(td.currents[i]));
            if (std::abs(ta.currents[i] - td.currents[i]) > 1e-8 * scale)
                throw ValidationError("benchmark cross-check: solver modes disagree at n = " +
                                      std::to_string(n));
        }

        for (PackConfig* config : {&analytical, &dense}) {
            std::vector<double> times;
            times.reserve(repeats);
            for (int rep = 0; rep < repeats; ++rep) {
                const auto start = clock::now();
                const SimulationTrace t = simulate(*config, profile);
                const auto stop = clock::now();
                (void)t;
                times.push_back(std::chrono::duration<double>(stop - start).count());
            }

            // Isolated branch solve at the initial state; batch until the
            // clock resolution stops mattering.
            PackState state{config->initial_states};
            const double applied = profile.current_at(0.0);
            std::size_t iters = 1;
            double elapsed = 0.0;
            double sink = 0.0;
            while (true) {
                const auto start = clock::now();
                for (std::size_t it = 0; it < iters; ++it) {
                    const BranchSolution sol = solve_branch_currents(*config, state, applied);
                    sink += sol.currents[0];
                }
                elapsed = std::chrono::duration<double>(clock::now() - start).count();
                if (elapsed >= 0.02 || iters >= (1u << 22)) break;
                iters *= 2;
            }
            if (!std::isfinite(sink)) throw NumericalError("benchmark solve produced non-finite currents");

            BenchmarkEntry entry;
            entry.n = n;
            entry.mode = config->solver_mode;
            entry.median_s = median(times);
            entry.mean_s =
                std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
            entry.per_solve_us = 1e6 * elapsed / static_cast<double>(iters);
            table.entries.push_back(entry);

            auto& pts = config->solver_mode == SolverMode::analytical_with_r ? pts_analytical
                                                                             : pts_dense;
            pts.emplace_back(static_cast<double>(n), entry.per_solve_us);
        }
    }

    if (pts_analytical.size() >= 2) table.slope_analytical = fit_loglog_slope(pts_analytical);
    if (pts_dense.size() >= 2) table.slope_dense = fit_loglog_slope(pts_dense);
    return table;
}

std::string to_string(SolverMode mode) {
    switch (mode) {
    case SolverMode::analytical_no_r: return "analytical-no-R";
    case SolverMode::analytical_with_r: return "analytical-with-R";
    case SolverMode::dense_per_step: return "dense-per-step";
    }
    return "unknown";
}

SolverMode solver_mode_from_string(const std::string& name) {
    if (name == "analytical-no-R") return SolverMode::analytical_no_r;
    if (name == "analytical-with-R") return SolverMode::analytical_with_r;
    if (name == "dense-per-step") return SolverMode::dense_per_step;
    throw ValidationError("unknown solver_mode '" + name + "'");
}

std::string to_string(IntegratorMethod method) {
    return method == IntegratorMethod::rk4_fixed ? "rk4-fixed" : "rk45-adaptive";
}

IntegratorMethod integrator_method_from_string(const std::string& name) {
    if (name == "rk4-fixed") return IntegratorMethod::rk4_fixed;
    if (name == "rk45-adaptive") return IntegratorMethod::rk45_adaptive;
    throw ValidationError("unknown integrator method '" + name + "'");
}

} // namespace packflow
