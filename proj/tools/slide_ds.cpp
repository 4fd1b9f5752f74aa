// Scenario runner for the sliding-DS compliance stack.
//
//   slide_ds run <scenario.json> --out <dir>
//   slide_ds sweep <scenario.json> --axis key=v1,v2,... --reps N --out <dir>
//   slide_ds metrics <trace.csv>
//
// Exit status: 0 success, 1 scenario/parse error, 2 simulation error.

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slideds/experiment.hpp"
#include "slideds/trace_io.hpp"

namespace {

// "key=v1,v2,..." -> axis entry
bool parse_axis(const std::string& spec,
                std::map<std::string, std::vector<double>>& axes,
                std::string& error) {
    const size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        error = "axis must look like key=v1,v2,...: " + spec;
        return false;
    }
    const std::string key = spec.substr(0, eq);
    std::vector<double> values;
    std::stringstream ss(spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            error = "axis value is not a number: " + item;
            return false;
        }
    }
    if (values.empty()) {
        error = "sweep axis empty: " + key;
        return false;
    }
    axes[key] = values;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"force-limited sliding-DS contact control, scenario harness"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::vector<std::string> axis_specs;
    int reps = 0;
    std::string trace_path;

    auto* run_cmd = app.add_subcommand("run", "execute one scenario file");
    run_cmd->add_option("scenario", scenario_path, "scenario JSON")->required();
    run_cmd->add_option("--out", out_dir, "output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep over a scenario");
    sweep_cmd->add_option("scenario", scenario_path, "scenario JSON")->required();
    sweep_cmd->add_option("--axis", axis_specs, "sweep axis key=v1,v2,...");
    sweep_cmd->add_option("--reps", reps, "repeats per condition (distinct seeds)");
    sweep_cmd->add_option("--out", out_dir, "output directory");

    auto* metrics_cmd = app.add_subcommand("metrics", "recompute metrics from a trace.csv");
    metrics_cmd->add_option("trace", trace_path, "trace.csv path")->required();

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return slideds::run_scenario(scenario_path, out_dir);

    if (sweep_cmd->parsed()) {
        std::map<std::string, std::vector<double>> axes;
        std::string error;
        for (const auto& spec : axis_specs) {
            if (!parse_axis(spec, axes, error)) {
                std::cerr << "error: " << error << "\n";
                return 1;
            }
        }
        return slideds::sweep(scenario_path, axes, reps, out_dir);
    }

    // metrics
    try {
        const slideds::Trace trace = slideds::read_trace_csv(trace_path);
        std::cout << slideds::trace_metrics_json(trace).dump(2) << "\n";
    } catch (const slideds::TraceIoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
