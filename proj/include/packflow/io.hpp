#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "packflow/sim.hpp"

// File formats: pack configurations as JSON documents, current profiles and
// traces as single-header CSV, benchmark tables as JSON. Floats are written
// with nine significant digits; loaders validate shape and invariants and
// report offending field paths.

namespace packflow::io {

/// Loads and fully validates a pack configuration. Gaussian sampling blocks
/// are expanded here with their recorded seed (seed_override replaces it when
/// given), so the returned config always carries explicit per-cell values.
PackConfig load_config(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = {});

/// Writes the expanded form (no sampling block; the seed is kept as
/// metadata). load_config(save_config(c)) reproduces c exactly.
void save_config(const PackConfig& config, const std::filesystem::path& path);

/// Two-column CSV (t_s, I_A) with one header line.
CurrentProfile load_profile(const std::filesystem::path& path,
                            CurrentProfile::Interpolation interpolation =
                                CurrentProfile::Interpolation::zero_order_hold);

/// Columns: t_s, I_A, then per cell k: ik_A, zk, wk_V, vk_V, then pack_V.
void write_trace(const SimulationTrace& trace, const std::filesystem::path& path);

/// Parses a CSV in the trace schema (measured data uses the same layout).
SimulationTrace read_trace(const std::filesystem::path& path);

void write_benchmark(const BenchmarkTable& table, const std::filesystem::path& path);

/// Mean squared error between two aligned series. Throws LengthMismatch.
double mse(std::span<const double> reference, std::span<const double> simulated);

double max_abs_error(std::span<const double> reference, std::span<const double> simulated);

/// Linear resampling of (times, values) onto new sample times, which must lie
/// inside the source time range.
std::vector<double> resample_linear(std::span<const double> times, std::span<const double> values,
                                    std::span<const double> new_times);

/// Per-cell comparison of two traces in the trace schema.
struct ValidationReport {
    struct Row {
        std::size_t cell = 0;
        double mse_A2 = 0.0;
        double max_abs_A = 0.0;
    };
    std::vector<Row> rows;
    double worst_mse_A2 = 0.0;
    double worst_max_abs_A = 0.0;
};

ValidationReport compare_traces(const SimulationTrace& reference, const SimulationTrace& simulated,
                                bool resample);

void write_validation_report(const ValidationReport& report, const std::filesystem::path& path);

} // namespace packflow::io
