// Deterministic fixed-timestep orchestration. Each step advances rover,
// vision, mission, planner, and drone dynamics in a fixed order and appends
// one trace record; the trace is a pure function of (scenario, seed).
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "swarmsim/mission.hpp"
#include "swarmsim/scenario.hpp"
#include "swarmsim/types.hpp"
#include "swarmsim/vision.hpp"

namespace swarmsim {

struct SimEvent {
    double t = 0.0;
    std::string kind;  // "phase_change" | "touchdown" | "abort"
    int agent_id = -1;
    std::string from;
    std::string to;
    double est_error = std::numeric_limits<double>::quiet_NaN();   // touchdown: vs estimate
    double true_error = std::numeric_limits<double>::quiet_NaN();  // touchdown: vs ground truth
};

struct TickRecord {
    double t = 0.0;
    std::vector<AgentState> drones;  // scenario order
    RoverState rover;
    MissionPhase phase = MissionPhase::Search;
    std::optional<TagObservation> observation;  // present only on camera-frame ticks
};

struct SimTrace {
    Scenario scenario;
    std::uint64_t seed = 0;
    std::string scenario_hash;
    std::vector<TickRecord> ticks;
    std::vector<SimEvent> events;
    bool aborted = false;
    bool all_landed = false;
    double time_to_land = std::numeric_limits<double>::quiet_NaN();  // last touchdown, s
};

SimTrace run(const Scenario& scenario);

// Batch semantics of the experiments: run i uses seed_base + i. Runs may
// execute on worker threads (bounded by SWARMSIM_THREADS, 0 or 1 = serial);
// the output order is always by run index.
std::vector<SimTrace> run_batch(const Scenario& scenario, int n_runs, std::uint64_t seed_base);

unsigned batch_threads();  // resolved SWARMSIM_THREADS value

}  // namespace swarmsim
