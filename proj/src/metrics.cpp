#include "swarmsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace swarmsim {

namespace {

// Slot errors against the ground-truth rover pose at one tick.
std::map<int, double> tick_errors(const TickRecord& rec, const FormationSpec& formation) {
    const auto targets = slot_targets(rec.rover.pose, formation, 0.0);
    std::map<int, double> errs;
    for (const auto& d : rec.drones) {
        errs[d.id] = horizontal_distance(Vec3(d.position.x(), d.position.y(), 0.0),
                                         targets.at(d.id));
    }
    return errs;
}

bool in_window(MissionPhase phase) {
    return phase == MissionPhase::Descend || phase == MissionPhase::Touchdown;
}

std::map<int, double> final_errors(const SimTrace& trace) {
    // Touchdown-instant error per drone; drones that never landed contribute
    // their last-tick error.
    std::map<int, double> out;
    if (trace.ticks.empty()) return out;
    const auto last = tick_errors(trace.ticks.back(), trace.scenario.formation);
    for (const auto& [id, err] : last) out[id] = err;
    for (const auto& ev : trace.events) {
        if (ev.kind == "touchdown") out[ev.agent_id] = ev.true_error;
    }
    return out;
}

}  // namespace

std::map<int, double> landing_rmse(const SimTrace& trace, RmseWindow window) {
    if (window == RmseWindow::Final) {
        auto errs = final_errors(trace);
        if (errs.empty()) throw std::invalid_argument("landing_rmse: empty trace");
        for (auto& [id, e] : errs) e *= 100.0;
        return errs;
    }

    std::map<int, double> sum_sq;
    long n = 0;
    for (const auto& rec : trace.ticks) {
        if (!in_window(rec.phase)) continue;
        for (const auto& [id, err] : tick_errors(rec, trace.scenario.formation)) {
            sum_sq[id] += err * err;
        }
        ++n;
    }
    if (n == 0) {
        throw std::invalid_argument("landing_rmse: trace contains no ticks in the selected window");
    }
    std::map<int, double> rmse;
    for (const auto& [id, ss] : sum_sq) {
        rmse[id] = std::sqrt(ss / static_cast<double>(n)) * 100.0;
    }
    return rmse;
}

double overall_rmse(const SimTrace& trace, RmseWindow window) {
    const auto per_drone = landing_rmse(trace, window);
    double mean_sq = 0.0;
    for (const auto& [id, r] : per_drone) mean_sq += r * r;
    return std::sqrt(mean_sq / static_cast<double>(per_drone.size()));
}

double min_pairwise_distance(const SimTrace& trace) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : trace.ticks) {
        for (std::size_t i = 0; i < rec.drones.size(); ++i) {
            for (std::size_t j = i + 1; j < rec.drones.size(); ++j) {
                best = std::min(best,
                                distance(rec.drones[i].position, rec.drones[j].position));
            }
        }
    }
    return best;
}

namespace {

std::map<int, std::string> slot_labels(const FormationSpec& formation) {
    std::map<int, std::string> labels;
    for (const auto& [id, off] : formation.offsets) {
        if (off.isZero(0.0)) {
            labels[id] = "leader";
        } else if (off.y() > 0.0) {
            labels[id] = "2L";
        } else if (off.y() < 0.0) {
            labels[id] = "3R";
        } else {
            labels[id] = "drone " + std::to_string(id);
        }
    }
    return labels;
}

}  // namespace

RunReport make_report(const SimTrace& trace, RmseWindow window) {
    RunReport rep;
    rep.seed = trace.seed;
    rep.rover_speed = trace.scenario.rover.speed;
    bool has_window = window == RmseWindow::Final;
    for (const auto& rec : trace.ticks) has_window = has_window || in_window(rec.phase);
    if (has_window) {
        rep.rmse_cm = landing_rmse(trace, window);
        rep.overall_rmse_cm = overall_rmse(trace, window);
    } else {
        // never reached the descent: no landing window to score
        rep.overall_rmse_cm = std::numeric_limits<double>::quiet_NaN();
    }
    rep.final_error_cm = landing_rmse(trace, RmseWindow::Final);
    rep.labels = slot_labels(trace.scenario.formation);
    rep.min_pairwise_m = min_pairwise_distance(trace);
    rep.time_to_land_s = trace.time_to_land;
    rep.aborted = trace.aborted;
    rep.all_landed = trace.all_landed;

    std::map<int, bool> touched;
    for (const auto& ev : trace.events) {
        if (ev.kind == "touchdown") touched[ev.agent_id] = true;
    }
    for (const auto& d : trace.scenario.drones) {
        const bool down = touched.count(d.id) > 0;
        const double final_m = rep.final_error_cm.count(d.id)
                                   ? rep.final_error_cm.at(d.id) / 100.0
                                   : std::numeric_limits<double>::infinity();
        rep.landed[d.id] = down && final_m <= kLandingSuccessThreshold;
    }
    return rep;
}

std::vector<SpeedSummary> summarize_batch(const std::vector<RunReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("summarize_batch: no reports");

    std::map<double, std::vector<const RunReport*>> by_speed;
    for (const auto& r : reports) by_speed[r.rover_speed].push_back(&r);

    std::vector<SpeedSummary> out;
    for (const auto& [speed, group] : by_speed) {
        SpeedSummary s;
        s.speed = speed;
        s.runs = static_cast<int>(group.size());
        std::map<std::string, double> sums;
        std::map<std::string, int> counts;
        int scored = 0;
        for (const RunReport* r : group) {
            if (std::isfinite(r->overall_rmse_cm)) {
                s.mean_overall_rmse_cm += r->overall_rmse_cm;
                ++scored;
            }
            bool all = true;
            for (const auto& [id, ok] : r->landed) all = all && ok;
            if (all && !r->landed.empty()) ++s.landed_runs;
            for (const auto& [id, rmse] : r->rmse_cm) {
                const auto label = r->labels.count(id) ? r->labels.at(id)
                                                       : "drone " + std::to_string(id);
                sums[label] += rmse;
                counts[label] += 1;
            }
        }
        s.mean_overall_rmse_cm = scored > 0
                                     ? s.mean_overall_rmse_cm / scored
                                     : std::numeric_limits<double>::quiet_NaN();
        for (const auto& [label, sum] : sums) {
            s.per_drone_rmse_cm[label] = sum / counts.at(label);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string format_summary_table(const std::vector<SpeedSummary>& summaries) {
    std::ostringstream os;
    os << "                          Mobile robot velocity, m/s\n";
    os << "                          ";
    for (const auto& s : summaries) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%8.2f", s.speed);
        os << buf;
    }
    os << "\n";

    std::vector<std::string> labels;
    for (const auto& s : summaries) {
        for (const auto& [label, rmse] : s.per_drone_rmse_cm) {
            if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
                labels.push_back(label);
            }
        }
    }
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
        if (a == "leader") return b != "leader";
        if (b == "leader") return false;
        return a < b;
    });

    for (const auto& label : labels) {
        char head[32];
        std::snprintf(head, sizeof(head), "%-26s", (label + " RMSE, cm").c_str());
        os << head;
        for (const auto& s : summaries) {
            char buf[16];
            if (s.per_drone_rmse_cm.count(label)) {
                std::snprintf(buf, sizeof(buf), "%8.2f", s.per_drone_rmse_cm.at(label));
            } else {
                std::snprintf(buf, sizeof(buf), "%8s", "-");
            }
            os << buf;
        }
        os << "\n";
    }
    os << "overall RMSE, cm          ";
    for (const auto& s : summaries) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%8.2f", s.mean_overall_rmse_cm);
        os << buf;
    }
    os << "\n";
    os << "landed runs               ";
    for (const auto& s : summaries) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%5d/%-2d", s.landed_runs, s.runs);
        os << buf;
    }
    os << "\n";
    return os.str();
}

namespace {

// Batch-mean overall RMSE at a given sigma; +inf when any run fails to land
// (pushes the bisection down).
double batch_rmse_at_sigma(const Scenario& base, double sigma, int n_runs,
                           std::uint64_t seed_base) {
    Scenario sc = base;
    sc.noise.sigma_pos = sigma;
    const auto traces = run_batch(sc, n_runs, seed_base);
    double sum = 0.0;
    for (const auto& trace : traces) {
        if (!trace.all_landed) return std::numeric_limits<double>::infinity();
        sum += overall_rmse(trace, RmseWindow::DescendTouchdown);
    }
    return sum / static_cast<double>(traces.size());
}

}  // namespace

CalibrationResult calibrate_noise(double target_rmse_cm, const Scenario& scenario, int n_runs,
                                  std::uint64_t seed_base, double rel_tol) {
    if (target_rmse_cm < 0.0)
        throw std::invalid_argument("calibrate_noise: target must be >= 0");

    CalibrationResult result;
    double lo = 0.0;
    double hi = 0.2;  // m, search bracket

    const double floor_rmse = batch_rmse_at_sigma(scenario, lo, n_runs, seed_base);
    ++result.evaluations;
    // At or below the noiseless floor the best achievable sigma is zero.
    if (target_rmse_cm <= floor_rmse) {
        result.sigma_pos = 0.0;
        result.achieved_rmse_cm = floor_rmse;
        if (floor_rmse - target_rmse_cm > rel_tol * std::max(target_rmse_cm, 1e-9) &&
            target_rmse_cm > 0.0) {
            throw std::runtime_error(
                "calibrate_noise: target below the noiseless floor of the scenario");
        }
        return result;
    }
    const double hi_rmse = batch_rmse_at_sigma(scenario, hi, n_runs, seed_base);
    ++result.evaluations;
    if (hi_rmse < target_rmse_cm) {
        throw std::runtime_error(
            "calibrate_noise: target unreachable within the sigma bracket [0, 0.2] m");
    }

    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 48; ++iter) {
        mid = 0.5 * (lo + hi);
        const double rmse = batch_rmse_at_sigma(scenario, mid, n_runs, seed_base);
        ++result.evaluations;
        if (std::isfinite(rmse) && std::abs(rmse - target_rmse_cm) <= rel_tol * target_rmse_cm) {
            result.sigma_pos = mid;
            result.achieved_rmse_cm = rmse;
            return result;
        }
        if (rmse < target_rmse_cm) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw std::runtime_error("calibrate_noise: bisection failed to meet the tolerance");
}

}  // namespace swarmsim
