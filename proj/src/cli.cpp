#include "packflow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "packflow/design.hpp"
#include "packflow/io.hpp"
#include "packflow/sim.hpp"

namespace packflow {

namespace {

CurrentProfile::Interpolation parse_interp(const std::string& name) {
    if (name == "hold") return CurrentProfile::Interpolation::zero_order_hold;
    if (name == "linear") return CurrentProfile::Interpolation::linear;
    throw ValidationError("unknown interpolation '" + name + "' (expected hold or linear)");
}

std::vector<std::size_t> parse_n_list(const std::string& csv) {
    std::vector<std::size_t> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        const long long v = std::stoll(item, &pos);
        if (pos != item.size() || v < 2)
            throw ValidationError("bad --n-list entry '" + item + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw ValidationError("--n-list is empty");
    return out;
}

int cmd_simulate(const std::string& config_path, const std::string& profile_path,
                 const std::string& out_path, const std::optional<std::string>& mode,
                 const std::optional<double>& scale_c, const std::optional<double>& dt,
                 const std::optional<std::uint64_t>& seed, const std::string& interp) {
    const auto t0 = std::chrono::steady_clock::now();
    PackConfig config = io::load_config(config_path, seed);
    const CurrentProfile profile = io::load_profile(profile_path, parse_interp(interp));
    if (mode) config.solver_mode = solver_mode_from_string(*mode);
    if (scale_c) config.scale_c = *scale_c;
    if (dt) config.integrator.dt = *dt;
    config.validate();

    const SimulationTrace trace = simulate(config, profile);
    io::write_trace(trace, out_path);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::size_t last = trace.samples() - 1;
    double z_lo = trace.at(trace.soc, last, 0), z_hi = z_lo;
    double max_kcl = 0.0;
    for (std::size_t k = 0; k < trace.n_cells; ++k) {
        z_lo = std::min(z_lo, trace.at(trace.soc, last, k));
        z_hi = std::max(z_hi, trace.at(trace.soc, last, k));
    }
    for (const StepDiagnostics& d : trace.diagnostics) max_kcl = std::max(max_kcl, d.kcl_residual);

    std::cout << "wrote " << trace.samples() << " samples to " << out_path << "\n"
              << "termination: " << trace.termination_reason << " at t = "
              << trace.times[last] << " s\n"
              << "final SoC spread: " << (z_hi - z_lo) << "\n"
              << "max KCL residual: " << max_kcl << " A\n"
              << "wall time: " << wall << " s\n";
    if (trace.clamp_warnings > 0)
        std::cout << "warning: clamped SoC " << trace.clamp_warnings << " times\n";
    return 0;
}

int cmd_design(const std::string& config_path, const std::optional<double>& rn,
               const std::optional<double>& r1_bound, const std::string& out_path) {
    const PackConfig config = io::load_config(config_path);
    const std::size_t n = config.size();
    if (n < 2) throw ValidationError("design needs at least two cells");

    std::vector<double> capacities(n);
    for (std::size_t k = 0; k < n; ++k) capacities[k] = config.cells[k].capacity_As;
    std::vector<double> interconnect = config.interconnect_R;
    if (interconnect.empty()) interconnect.assign(n - 1, 0.0);

    const double r_last = rn ? *rn
                             : config.cells.back().series_resistance_r.eval(
                                   config.initial_states.back().soc_z);
    const std::vector<double> schedule = synthesize_uniform_r(capacities, interconnect, r_last);
    const std::vector<double> resid = qr_residuals(capacities, schedule, interconnect);

    double max_resid = 0.0;
    for (double v : resid) max_resid = std::max(max_resid, std::abs(v));

    nlohmann::json doc;
    doc["r_schedule_ohm"] = schedule;
    doc["qr_residuals_ohm_As"] = resid;
    doc["max_abs_residual_ohm_As"] = max_resid;
    doc["r_n_ohm"] = r_last;
    if (r1_bound) {
        doc["r1_bound_ohm"] = *r1_bound;
        if (schedule.front() > *r1_bound) {
            doc["warning"] = "synthesized r_1 exceeds the realizability bound";
            std::cout << "warning: synthesized r_1 = " << schedule.front()
                      << " ohm exceeds bound " << *r1_bound << " ohm\n";
        }
    }
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot write " + out_path);
    out << doc.dump(2) << '\n';
    std::cout << "wrote schedule for " << n << " cells to " << out_path
              << " (max |residual| = " << max_resid << " ohm*As)\n";
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& n_list_csv, int repeats,
              const std::string& out_path, double sim_t, const std::string& profile_path,
              const std::string& interp) {
    const PackConfig base = io::load_config(config_path);
    const std::vector<std::size_t> n_list = parse_n_list(n_list_csv);

    CurrentProfile profile;
    if (!profile_path.empty()) {
        profile = io::load_profile(profile_path, parse_interp(interp));
    } else {
        // 2C of the replicated pack at its largest size; held constant.
        double q_mean = 0.0;
        for (const auto& cell : base.cells) q_mean += cell.capacity_Ah();
        q_mean /= static_cast<double>(base.size());
        const double n_max = static_cast<double>(*std::max_element(n_list.begin(), n_list.end()));
        profile.breakpoints = {{0.0, 2.0 * q_mean * n_max}};
    }

    const BenchmarkTable table = benchmark_solvers(n_list, repeats, profile, base, sim_t);
    io::write_benchmark(table, out_path);

    std::printf("%6s  %-18s  %12s  %12s  %14s\n", "n", "mode", "median_s", "mean_s",
                "per_solve_us");
    for (const BenchmarkEntry& e : table.entries)
        std::printf("%6zu  %-18s  %12.6f  %12.6f  %14.3f\n", e.n, to_string(e.mode).c_str(),
                    e.median_s, e.mean_s, e.per_solve_us);
    std::printf("log-log slope (per solve): analytical %.3f, dense %.3f\n",
                table.slope_analytical, table.slope_dense);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_validate(const std::string& reference_path, const std::string& simulated_path,
                 const std::string& out_path, bool resample) {
    const SimulationTrace reference = io::read_trace(reference_path);
    const SimulationTrace simulated = io::read_trace(simulated_path);
    const io::ValidationReport report = io::compare_traces(reference, simulated, resample);
    io::write_validation_report(report, out_path);

    std::printf("%4s  %14s  %14s\n", "cell", "mse_A2", "max_abs_err_A");
    for (const auto& row : report.rows)
        std::printf("%4zu  %14.6e  %14.6e\n", row.cell, row.mse_A2, row.max_abs_A);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Parallel-pack branch-current simulation and design"};
    app.require_subcommand(1);

    std::string config_path, profile_path, out_path, interp = "hold";
    std::optional<std::string> mode;
    std::optional<double> scale_c, dt, rn, r1_bound;
    std::optional<std::uint64_t> seed;

    auto* sim = app.add_subcommand("simulate", "Integrate a pack over a current profile");
    sim->add_option("--config", config_path, "pack config JSON")->required();
    sim->add_option("--profile", profile_path, "current profile CSV (t_s,I_A)")->required();
    sim->add_option("--out", out_path, "output trace CSV")->required();
    sim->add_option("--mode", mode,
                    "solver mode: analytical-no-R | analytical-with-R | dense-per-step");
    sim->add_option("--c", scale_c, "recurrence scale constant in (0,1]");
    sim->add_option("--dt", dt, "integrator step, seconds");
    sim->add_option("--seed", seed, "override the sampling seed");
    sim->add_option("--interp", interp, "profile interpolation: hold | linear");

    auto* design = app.add_subcommand("design", "Synthesize a uniform-sharing r schedule");
    design->add_option("--config", config_path, "pack config JSON")->required();
    design->add_option("--rn", rn, "series resistance of the last cell, ohms");
    design->add_option("--r1-bound", r1_bound, "warn when synthesized r_1 exceeds this");
    design->add_option("--out", out_path, "output JSON")->required();

    std::string n_list_csv;
    int repeats = 5;
    double sim_t = 30.0;
    auto* bench = app.add_subcommand("bench", "Compare analytical and dense solver timing");
    bench->add_option("--config", config_path, "pack config JSON used as the cell template")
        ->required();
    bench->add_option("--n-list", n_list_csv, "comma-separated pack sizes")->required();
    bench->add_option("--repeats", repeats, "timing repetitions per point");
    bench->add_option("--out", out_path, "output JSON")->required();
    bench->add_option("--sim-t", sim_t, "simulated horizon per timing run, seconds");
    bench->add_option("--profile", profile_path, "current profile CSV (default: constant 2C)");
    bench->add_option("--interp", interp, "profile interpolation: hold | linear");

    std::string reference_path, simulated_path;
    bool resample = false;
    auto* validate = app.add_subcommand("validate", "Per-cell current error between two traces");
    validate->add_option("--reference", reference_path, "reference trace CSV")->required();
    validate->add_option("--simulated", simulated_path, "simulated trace CSV")->required();
    validate->add_option("--out", out_path, "output CSV report")->required();
    validate->add_flag("--resample", resample, "linearly resample the reference onto the "
                                               "simulated timestamps");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("packflow");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, profile_path, out_path, mode, scale_c, dt, seed,
                                interp);
        if (design->parsed()) return cmd_design(config_path, rn, r1_bound, out_path);
        if (bench->parsed())
            return cmd_bench(config_path, n_list_csv, repeats, out_path, sim_t, profile_path,
                             interp);
        if (validate->parsed())
            return cmd_validate(reference_path, simulated_path, out_path, resample);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

} // namespace packflow
