// swarmsim command line: run single scenarios, seeded batches, speed sweeps,
// and the sensor-noise calibration; writes trace CSVs, summary JSON, and
// top-view SVG plots per run.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swarmsim/io.hpp"
#include "swarmsim/metrics.hpp"
#include "swarmsim/scenario.hpp"
#include "swarmsim/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitAborted = 3;
constexpr int kExitIo = 4;

namespace fs = std::filesystem;
using namespace swarmsim;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RmseWindow parse_window(const std::string& name) {
    if (name == "phase") return RmseWindow::DescendTouchdown;
    if (name == "final") return RmseWindow::Final;
    throw CLI::ValidationError("--window must be 'phase' or 'final'");
}

void write_run_outputs(const fs::path& dir, const SimTrace& trace) {
    fs::create_directories(dir);
    write_file((dir / "trace.csv").string(), trace_to_csv(trace));
    write_file((dir / "plot.svg").string(), trace_to_svg(trace));
}

// Traces -> reports + summary files; returns the process exit code.
int finalize(const std::vector<SimTrace>& traces, const fs::path& out_dir, RmseWindow window,
             const std::string& window_name, bool print_table) {
    std::vector<RunReport> reports;
    bool any_aborted = false;
    for (const auto& trace : traces) {
        reports.push_back(make_report(trace, window));
        any_aborted = any_aborted || trace.aborted;
    }
    const auto summaries = summarize_batch(reports);
    const std::string table = format_summary_table(summaries);
    if (print_table) std::cout << table;

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file((out_dir / "summary.json").string(),
                   summary_to_json(reports, summaries, traces.front().scenario_hash,
                                   window_name));
        write_file((out_dir / "summary.txt").string(), table);
        for (std::size_t i = 0; i < traces.size(); ++i) {
            write_run_outputs(out_dir / ("run_" + std::to_string(i)), traces[i]);
        }
    }
    return any_aborted ? kExitAborted : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarmsim: heterogeneous-swarm landing simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::string window_name = "phase";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int runs = 10;
    std::vector<double> speeds;
    double target_rmse = 4.48;

    auto add_common = [&](CLI::App* cmd, bool needs_scenario = true) {
        auto* opt = cmd->add_option("--scenario", scenario_path, "scenario JSON file");
        if (needs_scenario) opt->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--window", window_name, "RMSE window: phase|final")
            ->check(CLI::IsMember({"phase", "final"}));
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; },
            "seed (run) / seed base (batch, sweep, calibrate)");
    };

    auto* cmd_run = app.add_subcommand("run", "simulate one scenario");
    add_common(cmd_run);

    auto* cmd_batch = app.add_subcommand("batch", "run n seeded repetitions");
    add_common(cmd_batch);
    cmd_batch->add_option("--runs", runs, "repetitions")->check(CLI::PositiveNumber);

    auto* cmd_sweep = app.add_subcommand("sweep", "batch per rover speed");
    add_common(cmd_sweep);
    cmd_sweep->add_option("--runs", runs, "repetitions per speed")->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--speeds", speeds, "rover speeds, m/s")->delimiter(',');

    auto* cmd_calibrate =
        app.add_subcommand("calibrate", "fit sigma_pos to a target landing RMSE");
    add_common(cmd_calibrate);
    cmd_calibrate->add_option("--runs", runs, "repetitions per evaluation")
        ->check(CLI::PositiveNumber);
    cmd_calibrate->add_option("--target-rmse", target_rmse, "target overall RMSE, cm");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string text = read_file(scenario_path);
        const RmseWindow window = parse_window(window_name);

        if (cmd_run->parsed()) {
            Scenario sc = parse_scenario_text(text);
            if (seed_set) sc.seed = seed;
            const SimTrace trace = run(sc);
            return finalize({trace}, out_dir, window, window_name, true);
        }

        if (cmd_batch->parsed()) {
            Scenario sc = parse_scenario_text(text);
            const std::uint64_t base = seed_set ? seed : sc.seed;
            const auto traces = run_batch(sc, runs, base);
            return finalize(traces, out_dir, window, window_name, true);
        }

        if (cmd_sweep->parsed()) {
            std::vector<Scenario> scenarios;
            if (!speeds.empty()) {
                const Scenario base_sc = parse_scenario_text(text);
                for (double v : speeds) {
                    Scenario sc = base_sc;
                    sc.rover.speed = v;
                    const auto violations = sc.validate();
                    if (!violations.empty()) throw ScenarioError(violations.front());
                    scenarios.push_back(sc);
                }
            } else {
                scenarios = expand_sweep(text);
            }
            std::vector<SimTrace> traces;
            for (const auto& sc : scenarios) {
                const std::uint64_t base = seed_set ? seed : sc.seed;
                auto batch = run_batch(sc, runs, base);
                traces.insert(traces.end(), batch.begin(), batch.end());
            }
            return finalize(traces, out_dir, window, window_name, true);
        }

        if (cmd_calibrate->parsed()) {
            Scenario sc = parse_scenario_text(text);
            const std::uint64_t base = seed_set ? seed : sc.seed;
            const auto result = calibrate_noise(target_rmse, sc, runs, base);
            std::printf("sigma_pos = %.6f m (achieved %.3f cm over %d runs, %d evaluations)\n",
                        result.sigma_pos, result.achieved_rmse_cm, runs, result.evaluations);
            if (!out_dir.empty()) {
                fs::create_directories(out_dir);
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "{\n  \"sigma_pos\": %.9g,\n  \"achieved_rmse_cm\": %.9g,\n"
                              "  \"target_rmse_cm\": %.9g\n}\n",
                              result.sigma_pos, result.achieved_rmse_cm, target_rmse);
                write_file((fs::path(out_dir) / "calibration.json").string(), buf);
            }
            return kExitOk;
        }
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
