#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "slideds/scenario.hpp"
#include "slideds/simulator.hpp"
#include "slideds/trace_io.hpp"

namespace slideds {

/// One expanded sweep condition: axis values plus the seed of this repeat.
struct Condition {
    std::map<std::string, double> overrides;
    std::uint64_t seed{1};
    int rep{0};
};

/// Cartesian product of the axes times `reps` repeats with distinct seeds.
inline std::vector<Condition> expand_conditions(
    const std::map<std::string, std::vector<double>>& axes, int reps,
    std::uint64_t base_seed) {
    if (reps < 1) throw ScenarioError("sweep reps must be >= 1");
    for (const auto& [key, vals] : axes)
        if (vals.empty()) throw ScenarioError("sweep axis empty: " + key);

    std::vector<Condition> out{Condition{}};
    for (const auto& [key, vals] : axes) {
        std::vector<Condition> next;
        for (const auto& c : out) {
            for (double v : vals) {
                Condition nc = c;
                nc.overrides[key] = v;
                next.push_back(nc);
            }
        }
        out = std::move(next);
    }

    std::vector<Condition> with_reps;
    for (const auto& c : out) {
        for (int r = 0; r < reps; ++r) {
            Condition nc = c;
            nc.rep = r;
            nc.seed = base_seed + static_cast<std::uint64_t>(r);
            with_reps.push_back(nc);
        }
    }
    return with_reps;
}

namespace detail {

inline void write_run_outputs(const Trace& trace, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_trace_csv(trace, (dir / "trace.csv").string());
    std::ofstream mj(dir / "metrics.json");
    if (!mj) throw TraceIoError("cannot write metrics.json in " + dir.string());
    mj << trace_metrics_json(trace).dump(2) << "\n";
    write_plot_data(trace, (dir / "plot.csv").string());
}

inline std::uint64_t env_seed_override(std::uint64_t fallback) {
    const char* env = std::getenv("SLIDE_DS_SEED");
    if (!env || !*env) return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
        throw ScenarioError("SLIDE_DS_SEED is not an integer");
    return static_cast<std::uint64_t>(v);
}

inline void write_aggregate_csv(
    const std::filesystem::path& path, const std::vector<std::string>& axis_keys,
    const std::vector<std::pair<Condition, nlohmann::json>>& runs) {
    // Group repeats of the same axis point and average their metrics.
    std::map<std::vector<double>, std::vector<const nlohmann::json*>> groups;
    for (const auto& [cond, metrics] : runs) {
        std::vector<double> key;
        for (const auto& k : axis_keys) key.push_back(cond.overrides.at(k));
        groups[key].push_back(&metrics);
    }

    const std::vector<std::string> fields = {
        "mean_slide_force_newtons", "std_slide_force_newtons",
        "peak_force_newtons",       "transient_time_seconds",
        "attractor_error_m",        "min_gamma_margin"};

    std::ofstream out(path);
    if (!out) throw TraceIoError("cannot write " + path.string());
    for (const auto& k : axis_keys) out << k << ',';
    out << "runs";
    for (const auto& f : fields) out << ',' << f << "_mean," << f << "_std";
    out << '\n';

    for (const auto& [key, ms] : groups) {
        for (double v : key) out << detail::fmt(v) << ',';
        out << ms.size();
        for (const auto& f : fields) {
            double sum = 0.0, sum2 = 0.0;
            int n = 0;
            for (const auto* m : ms) {
                if (!m->contains(f) || !(*m)[f].is_number()) continue;
                const double v = (*m)[f].get<double>();
                sum += v;
                sum2 += v * v;
                ++n;
            }
            if (n == 0) {
                out << ",nan,nan";
            } else {
                const double mean = sum / n;
                const double var = n > 1 ? std::max(0.0, (sum2 - sum * sum / n) / (n - 1))
                                         : 0.0;
                out << ',' << detail::fmt(mean) << ',' << detail::fmt(std::sqrt(var));
            }
        }
        out << '\n';
    }
}

/// Shared engine behind `run` and `sweep`.
inline int run_experiment(const std::string& scenario_path,
                          const std::map<std::string, std::vector<double>>& extra_axes,
                          int reps_override, const std::string& out_dir) {
    nlohmann::json base;
    std::map<std::string, std::vector<double>> axes;
    int reps = 1;
    std::uint64_t base_seed = 1;
    try {
        base = load_scenario_json(scenario_path);
        const Scenario probe = scenario_from_json(base);   // full validation
        axes = probe.sweep_axes;
        reps = probe.sweep_reps;
        base_seed = env_seed_override(probe.sim.seed);
        for (const auto& [key, vals] : extra_axes) {
            if (vals.empty()) throw ScenarioError("sweep axis empty: " + key);
            if (!detail::find_path(base, key))
                throw ScenarioError("unknown sweep axis: " + key);
            axes[key] = vals;
        }
        if (reps_override > 0) reps = reps_override;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        const std::vector<Condition> conditions =
            expand_conditions(axes, reps, base_seed);
        const std::filesystem::path root(out_dir);
        std::filesystem::create_directories(root);

        std::vector<std::pair<Condition, nlohmann::json>> results;
        for (size_t i = 0; i < conditions.size(); ++i) {
            nlohmann::json doc = base;
            for (const auto& [key, v] : conditions[i].overrides)
                detail::set_path(doc, key, v);
            detail::set_path(doc, "sim.seed",
                             static_cast<double>(conditions[i].seed));
            const Scenario scenario = scenario_from_json(doc);

            const Trace trace = simulate(scenario);
            const std::filesystem::path dir =
                conditions.size() == 1
                    ? root
                    : root / ("run_" + std::string(i < 10 ? "00" : i < 100 ? "0" : "") +
                              std::to_string(i));
            detail::write_run_outputs(trace, dir);
            results.emplace_back(conditions[i], trace_metrics_json(trace));
        }

        if (conditions.size() > 1) {
            std::vector<std::string> axis_keys;
            for (const auto& [key, vals] : axes) axis_keys.push_back(key);
            detail::write_aggregate_csv(root / "metrics.csv", axis_keys, results);
        }
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace detail

/// Execute a scenario file (including any sweep axes it declares) into
/// out_dir. Returns a process exit status: 0 ok, 1 parse error, 2 simulation
/// error.
inline int run_scenario(const std::string& scenario_path, const std::string& out_dir) {
    return detail::run_experiment(scenario_path, {}, 0, out_dir);
}

/// Like run_scenario with additional axes and a repeat count from the
/// command line; file-declared axes are kept unless overridden.
inline int sweep(const std::string& scenario_path,
                 const std::map<std::string, std::vector<double>>& axis_overrides,
                 int reps, const std::string& out_dir) {
    return detail::run_experiment(scenario_path, axis_overrides, reps, out_dir);
}

}  // namespace slideds
