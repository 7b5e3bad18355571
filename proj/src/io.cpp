#include "packflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace packflow::io {

using nlohmann::json;

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

json require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw SchemaError(path + key, "missing required field");
    return obj.at(key);
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
    const json v = require(obj, key, path);
    if (!v.is_number()) throw SchemaError(path + key, "expected a number");
    return v.get<double>();
}

Polynomial parse_poly(const json& v, const std::string& path) {
    if (v.is_number()) return Polynomial::constant(v.get<double>());
    if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a number or coefficient array");
    std::vector<double> coeffs;
    coeffs.reserve(v.size());
    for (const auto& c : v) {
        if (!c.is_number()) throw SchemaError(path, "coefficients must be numbers");
        coeffs.push_back(c.get<double>());
    }
    return Polynomial(std::move(coeffs));
}

CellParameters parse_cell(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    CellParameters cell;
    cell.capacity_As = require_number(obj, "capacity_Q_Ah", path + ".") * 3600.0;
    cell.rc_capacitance_C = require_number(obj, "rc_capacitance_C", path + ".");
    cell.rc_resistance_F = parse_poly(require(obj, "rc_resistance_F", path + "."),
                                      path + ".rc_resistance_F");
    cell.series_resistance_r = parse_poly(require(obj, "series_resistance_r", path + "."),
                                          path + ".series_resistance_r");
    cell.ocv = parse_poly(require(obj, "ocv", path + "."), path + ".ocv");
    if (obj.contains("soc_bounds")) {
        const json& b = obj.at("soc_bounds");
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
            throw SchemaError(path + ".soc_bounds", "expected [lo, hi]");
        cell.soc_bounds = {b[0].get<double>(), b[1].get<double>()};
    }
    return cell;
}

json cell_to_json(const CellParameters& cell) {
    auto poly_to_json = [](const Polynomial& p) {
        return json(std::vector<double>(p.coefficients().begin(), p.coefficients().end()));
    };
    return json{{"capacity_Q_Ah", cell.capacity_Ah()},
                {"rc_capacitance_C", cell.rc_capacitance_C},
                {"rc_resistance_F", poly_to_json(cell.rc_resistance_F)},
                {"series_resistance_r", poly_to_json(cell.series_resistance_r)},
                {"ocv", poly_to_json(cell.ocv)},
                {"soc_bounds", json{cell.soc_bounds.lo, cell.soc_bounds.hi}}};
}

CellState parse_state(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    return {require_number(obj, "soc_z", path + "."),
            require_number(obj, "relaxation_w", path + ".")};
}

void expand_sampling(PackConfig& config, const json& sampling,
                     std::optional<std::uint64_t> seed_override) {
    const std::string path = "sampling.";
    const json seed_v = require(sampling, "seed", path);
    if (!seed_v.is_number_unsigned() && !seed_v.is_number_integer())
        throw SchemaError("sampling.seed", "expected an integer");
    const std::uint64_t seed = seed_override.value_or(seed_v.get<std::uint64_t>());

    std::size_t count = config.cells.size();
    if (sampling.contains("count")) {
        const json& c = sampling.at("count");
        if (!c.is_number_unsigned() && !c.is_number_integer())
            throw SchemaError("sampling.count", "expected an integer");
        count = c.get<std::size_t>();
        if (count < 1) throw SchemaError("sampling.count", "must be >= 1");
    }
    if (config.cells.size() == 1 && count > 1)
        config.cells.assign(count, config.cells.front());
    else if (config.cells.size() != count)
        throw SchemaError("sampling.count", "does not match the number of cells");

    const json means = require(sampling, "means", path);
    const json stds = require(sampling, "stds", path);
    const double r_mean = require_number(means, "series_resistance_r", "sampling.means.");
    const double f_mean = require_number(means, "rc_resistance_F", "sampling.means.");
    const double r_std = require_number(stds, "series_resistance_r", "sampling.stds.");
    const double f_std = require_number(stds, "rc_resistance_F", "sampling.stds.");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> r_draw(r_mean, r_std);
    std::normal_distribution<double> f_draw(f_mean, f_std);
    for (CellParameters& cell : config.cells) {
        double r = 0.0, f = 0.0;
        do { r = r_draw(rng); } while (r <= 0.0); // negative draws are resampled
        do { f = f_draw(rng); } while (f <= 0.0);
        cell.series_resistance_r = Polynomial::constant(r);
        cell.rc_resistance_F = Polynomial::constant(f);
    }
    config.sampling_seed = seed;
}

} // namespace

PackConfig load_config(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw SchemaError(path.string(), std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError(path.string(), "top level must be an object");

    PackConfig config;
    const json cells = require(doc, "cells", "");
    if (!cells.is_array() || cells.empty())
        throw SchemaError("cells", "expected a non-empty array");
    for (std::size_t k = 0; k < cells.size(); ++k)
        config.cells.push_back(parse_cell(cells[k], "cells[" + std::to_string(k) + "]"));

    if (doc.contains("solver_mode")) {
        const json& m = doc.at("solver_mode");
        if (!m.is_string()) throw SchemaError("solver_mode", "expected a string");
        config.solver_mode = solver_mode_from_string(m.get<std::string>());
    }
    if (doc.contains("scale_c")) {
        if (!doc.at("scale_c").is_number()) throw SchemaError("scale_c", "expected a number");
        config.scale_c = doc.at("scale_c").get<double>();
    }

    if (doc.contains("sampling")) expand_sampling(config, doc.at("sampling"), seed_override);
    if (doc.contains("sampling_seed")) {
        const json& s = doc.at("sampling_seed");
        if (!s.is_number_unsigned() && !s.is_number_integer())
            throw SchemaError("sampling_seed", "expected an integer");
        config.sampling_seed = s.get<std::uint64_t>();
    }

    const std::size_t n = config.cells.size();
    if (doc.contains("interconnect_R")) {
        const json& r = doc.at("interconnect_R");
        if (!r.is_array()) throw SchemaError("interconnect_R", "expected an array");
        for (const auto& v : r) {
            if (!v.is_number()) throw SchemaError("interconnect_R", "entries must be numbers");
            config.interconnect_R.push_back(v.get<double>());
        }
        if (!config.interconnect_R.empty() && config.interconnect_R.size() != n - 1)
            throw SchemaError("interconnect_R",
                              "expected " + std::to_string(n - 1) + " entries, got " +
                                  std::to_string(config.interconnect_R.size()));
    } else if (config.solver_mode != SolverMode::analytical_no_r && n > 1) {
        throw SchemaError("interconnect_R", "missing required field");
    }

    const json integ = require(doc, "integrator", "");
    if (!integ.is_object()) throw SchemaError("integrator", "expected an object");
    const json method = require(integ, "method", "integrator.");
    if (!method.is_string()) throw SchemaError("integrator.method", "expected a string");
    config.integrator.method = integrator_method_from_string(method.get<std::string>());
    config.integrator.t_end = require_number(integ, "t_end", "integrator.");
    if (integ.contains("dt")) config.integrator.dt = require_number(integ, "dt", "integrator.");
    if (integ.contains("rtol")) config.integrator.rtol = require_number(integ, "rtol", "integrator.");
    if (integ.contains("atol")) config.integrator.atol = require_number(integ, "atol", "integrator.");
    if (integ.contains("dt_min"))
        config.integrator.dt_min = require_number(integ, "dt_min", "integrator.");
    if (integ.contains("dt_max"))
        config.integrator.dt_max = require_number(integ, "dt_max", "integrator.");
    if (integ.contains("output_every")) {
        const json& oe = integ.at("output_every");
        if (!oe.is_number_unsigned() && !oe.is_number_integer())
            throw SchemaError("integrator.output_every", "expected an integer");
        config.integrator.output_every = oe.get<std::size_t>();
    }

    const json states = require(doc, "initial_states", "");
    if (states.is_object()) {
        config.initial_states.assign(n, parse_state(states, "initial_states"));
    } else if (states.is_array()) {
        if (states.size() == 1 && n > 1) {
            config.initial_states.assign(n, parse_state(states[0], "initial_states[0]"));
        } else {
            for (std::size_t k = 0; k < states.size(); ++k)
                config.initial_states.push_back(
                    parse_state(states[k], "initial_states[" + std::to_string(k) + "]"));
        }
    } else {
        throw SchemaError("initial_states", "expected an object or array");
    }

    if (doc.contains("limits")) {
        const json& lim = doc.at("limits");
        if (!lim.is_object()) throw SchemaError("limits", "expected an object");
        if (lim.contains("soc_policy")) {
            const std::string p = lim.at("soc_policy").get<std::string>();
            if (p == "abort") config.limits.soc_policy = SocPolicy::abort_run;
            else if (p == "clamp") config.limits.soc_policy = SocPolicy::clamp_and_warn;
            else throw SchemaError("limits.soc_policy", "expected 'abort' or 'clamp'");
        }
        if (lim.contains("v_min")) config.limits.v_min = require_number(lim, "v_min", "limits.");
        if (lim.contains("v_max")) config.limits.v_max = require_number(lim, "v_max", "limits.");
    }

    try {
        config.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return config;
}

void save_config(const PackConfig& config, const std::filesystem::path& path) {
    json doc;
    doc["cells"] = json::array();
    for (const CellParameters& cell : config.cells) doc["cells"].push_back(cell_to_json(cell));
    doc["interconnect_R"] = config.interconnect_R;
    doc["solver_mode"] = to_string(config.solver_mode);
    doc["scale_c"] = config.scale_c;

    json integ{{"method", to_string(config.integrator.method)},
               {"t_end", config.integrator.t_end},
               {"dt", config.integrator.dt},
               {"output_every", config.integrator.output_every}};
    if (config.integrator.method == IntegratorMethod::rk45_adaptive) {
        integ["rtol"] = config.integrator.rtol;
        integ["atol"] = config.integrator.atol;
        integ["dt_min"] = config.integrator.dt_min;
        integ["dt_max"] = config.integrator.dt_max;
    }
    doc["integrator"] = integ;

    doc["initial_states"] = json::array();
    for (const CellState& s : config.initial_states)
        doc["initial_states"].push_back({{"soc_z", s.soc_z}, {"relaxation_w", s.relaxation_w}});

    json lim;
    lim["soc_policy"] = config.limits.soc_policy == SocPolicy::abort_run ? "abort" : "clamp";
    if (config.limits.v_min) lim["v_min"] = *config.limits.v_min;
    if (config.limits.v_max) lim["v_max"] = *config.limits.v_max;
    doc["limits"] = lim;

    if (config.sampling_seed) doc["sampling_seed"] = *config.sampling_seed;

    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write config file: " + path.string());
    out << doc.dump(2) << '\n';
}

CurrentProfile load_profile(const std::filesystem::path& path,
                            CurrentProfile::Interpolation interpolation) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open profile file: " + path.string());

    CurrentProfile profile;
    profile.interpolation = interpolation;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string t_str, i_str;
        if (!std::getline(ss, t_str, ',') || !std::getline(ss, i_str)) {
            if (first) { first = false; continue; }
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected 't,I'");
        }
        char* end = nullptr;
        const double t = std::strtod(t_str.c_str(), &end);
        if (end == t_str.c_str()) {
            if (first) { first = false; continue; } // header line
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": not a number: " + t_str);
        }
        const double i = std::strtod(i_str.c_str(), &end);
        if (end == i_str.c_str())
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": not a number: " + i_str);
        profile.breakpoints.emplace_back(t, i);
        first = false;
    }
    profile.validate();
    return profile;
}

void write_trace(const SimulationTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write trace file: " + path.string());

    out << "t_s,I_A";
    for (std::size_t k = 1; k <= trace.n_cells; ++k)
        out << ",i" << k << "_A,z" << k << ",w" << k << "_V,v" << k << "_V";
    out << ",pack_V\n";

    for (std::size_t s = 0; s < trace.samples(); ++s) {
        out << fmt9(trace.times[s]) << ',' << fmt9(trace.applied_I[s]);
        for (std::size_t k = 0; k < trace.n_cells; ++k) {
            out << ',' << fmt9(trace.at(trace.currents, s, k)) << ','
                << fmt9(trace.at(trace.soc, s, k)) << ',' << fmt9(trace.at(trace.relaxation, s, k))
                << ',' << fmt9(trace.at(trace.voltage, s, k));
        }
        out << ',' << fmt9(trace.pack_voltage[s]) << '\n';
    }
}

SimulationTrace read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open trace file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty trace file");

    std::size_t cols = 1;
    for (char c : line) cols += c == ',';
    if (cols < 7 || (cols - 3) % 4 != 0)
        throw ValidationError(path.string() + ": not a trace file (bad column count " +
                              std::to_string(cols) + ")");

    SimulationTrace trace;
    trace.n_cells = (cols - 3) / 4;
    std::size_t line_no = 1;
    std::vector<double> row(cols);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        for (std::size_t c = 0; c < cols; ++c) {
            if (!std::getline(ss, field, ','))
                throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                      ": short row");
            char* end = nullptr;
            row[c] = std::strtod(field.c_str(), &end);
            if (end == field.c_str())
                throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                      ": not a number: " + field);
        }
        trace.times.push_back(row[0]);
        trace.applied_I.push_back(row[1]);
        for (std::size_t k = 0; k < trace.n_cells; ++k) {
            trace.currents.push_back(row[2 + 4 * k]);
            trace.soc.push_back(row[3 + 4 * k]);
            trace.relaxation.push_back(row[4 + 4 * k]);
            trace.voltage.push_back(row[5 + 4 * k]);
        }
        trace.pack_voltage.push_back(row[cols - 1]);
    }
    return trace;
}

void write_benchmark(const BenchmarkTable& table, const std::filesystem::path& path) {
    json doc;
    doc["repeats"] = table.repeats;
    doc["threads"] = table.threads;
    doc["results"] = json::array();
    for (const BenchmarkEntry& e : table.entries)
        doc["results"].push_back({{"n", e.n},
                                  {"mode", to_string(e.mode)},
                                  {"median_s", e.median_s},
                                  {"mean_s", e.mean_s},
                                  {"per_solve_us", e.per_solve_us}});
    doc["loglog_slope"] = {{"analytical-with-R", table.slope_analytical},
                           {"dense-per-step", table.slope_dense}};

    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write benchmark file: " + path.string());
    out << doc.dump(2) << '\n';
}

double mse(std::span<const double> reference, std::span<const double> simulated) {
    if (reference.size() != simulated.size())
        throw LengthMismatch("series length mismatch: " + std::to_string(reference.size()) +
                             " vs " + std::to_string(simulated.size()));
    if (reference.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = reference[i] - simulated[i];
        acc += d * d;
    }
    return acc / static_cast<double>(reference.size());
}

double max_abs_error(std::span<const double> reference, std::span<const double> simulated) {
    if (reference.size() != simulated.size())
        throw LengthMismatch("series length mismatch: " + std::to_string(reference.size()) +
                             " vs " + std::to_string(simulated.size()));
    double worst = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i)
        worst = std::max(worst, std::abs(reference[i] - simulated[i]));
    return worst;
}

std::vector<double> resample_linear(std::span<const double> times, std::span<const double> values,
                                    std::span<const double> new_times) {
    if (times.size() != values.size()) throw LengthMismatch("times/values length mismatch");
    if (times.size() < 2) throw ValidationError("resampling needs at least two source samples");

    std::vector<double> out;
    out.reserve(new_times.size());
    for (double t : new_times) {
        if (t < times.front() || t > times.back())
            throw ValidationError("resample target t = " + std::to_string(t) +
                                  " outside source range");
        auto hi = std::lower_bound(times.begin(), times.end(), t);
        if (hi == times.begin()) {
            out.push_back(values.front());
            continue;
        }
        const std::size_t j = static_cast<std::size_t>(hi - times.begin());
        if (j < times.size() && times[j] == t) {
            out.push_back(values[j]);
            continue;
        }
        const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
        out.push_back(values[j - 1] + w * (values[j] - values[j - 1]));
    }
    return out;
}

ValidationReport compare_traces(const SimulationTrace& reference, const SimulationTrace& simulated,
                                bool resample) {
    if (reference.n_cells != simulated.n_cells)
        throw LengthMismatch("traces have different cell counts");

    const std::size_t n = reference.n_cells;
    ValidationReport report;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> ref_k(reference.samples()), sim_k(simulated.samples());
        for (std::size_t s = 0; s < reference.samples(); ++s)
            ref_k[s] = reference.at(reference.currents, s, k);
        for (std::size_t s = 0; s < simulated.samples(); ++s)
            sim_k[s] = simulated.at(simulated.currents, s, k);

        std::vector<double> ref_aligned;
        if (resample && reference.samples() != simulated.samples()) {
            ref_aligned = resample_linear(reference.times, ref_k, simulated.times);
        } else {
            ref_aligned = std::move(ref_k);
        }

        ValidationReport::Row row;
        row.cell = k + 1;
        row.mse_A2 = mse(ref_aligned, sim_k);
        row.max_abs_A = max_abs_error(ref_aligned, sim_k);
        report.worst_mse_A2 = std::max(report.worst_mse_A2, row.mse_A2);
        report.worst_max_abs_A = std::max(report.worst_max_abs_A, row.max_abs_A);
        report.rows.push_back(row);
    }
    return report;
}

void write_validation_report(const ValidationReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write report file: " + path.string());
    out << "cell,mse_A2,max_abs_err_A\n";
    for (const auto& row : report.rows)
        out << row.cell << ',' << fmt9(row.mse_A2) << ',' << fmt9(row.max_abs_A) << '\n';
}

} // namespace packflow::io
