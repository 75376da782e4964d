// Evaluation quantities computed from traces: per-drone landing RMSE against
// the ground-truth formation slots, batch summaries in the experiment-table
// layout, and the noise calibration that inverts sensor sigma from a target
// landing RMSE.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swarmsim/sim.hpp"

namespace swarmsim {

enum class RmseWindow {
    DescendTouchdown,  // all ticks from descent start through touchdown (default)
    Final,             // touchdown-instant error per drone
};

// Horizontal RMSE per drone id over the selected window, in centimeters.
// Errors are measured against slot targets placed at the true rover pose.
std::map<int, double> landing_rmse(const SimTrace& trace, RmseWindow window);

// RMS across drones of the per-drone values computed over the same window.
double overall_rmse(const SimTrace& trace, RmseWindow window);

struct RunReport {
    std::uint64_t seed = 0;
    double rover_speed = 0.0;                   // m/s
    std::map<int, double> rmse_cm;              // per drone, selected window
    double overall_rmse_cm = 0.0;
    std::map<int, double> final_error_cm;       // touchdown-instant error
    std::map<int, bool> landed;                 // touched down within the success threshold
    std::map<int, std::string> labels;          // leader / 2L / 3R
    double min_pairwise_m = 0.0;
    double time_to_land_s = 0.0;                // NaN when the swarm never landed
    bool aborted = false;
    bool all_landed = false;
};

// Success threshold on the touchdown-instant slot error.
inline constexpr double kLandingSuccessThreshold = 0.15;  // m

RunReport make_report(const SimTrace& trace, RmseWindow window = RmseWindow::DescendTouchdown);

double min_pairwise_distance(const SimTrace& trace);

struct SpeedSummary {
    double speed = 0.0;
    int runs = 0;
    int landed_runs = 0;
    std::map<std::string, double> per_drone_rmse_cm;  // keyed by label
    double mean_overall_rmse_cm = 0.0;
};

// Mean per-drone and overall RMSE grouped by rover speed, ascending.
std::vector<SpeedSummary> summarize_batch(const std::vector<RunReport>& reports);

// The experiment-table layout: one row per drone label, one column per speed.
std::string format_summary_table(const std::vector<SpeedSummary>& summaries);

struct CalibrationResult {
    double sigma_pos = 0.0;     // m
    double achieved_rmse_cm = 0.0;
    int evaluations = 0;
};

// Bisection over sigma_pos in [0, 0.2] m until the batch-mean overall RMSE of
// the (static-platform) scenario matches target_rmse_cm within rel_tol.
// Deterministic given seed_base. Throws when the target is unreachable.
CalibrationResult calibrate_noise(double target_rmse_cm, const Scenario& scenario,
                                  int n_runs = 10, std::uint64_t seed_base = 1,
                                  double rel_tol = 0.10);

}  // namespace swarmsim
