#include "swarmsim/sim.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "swarmsim/apf.hpp"
#include "swarmsim/rng.hpp"
#include "swarmsim/vehicles.hpp"

namespace swarmsim {

namespace {

struct PendingObservation {
    double t_capture = 0.0;
    double t_delivery = 0.0;
    AgentState leader_at_capture;
    TagObservation obs;
};

struct Attachment {
    Vec2 pad_frame_offset = Vec2::Zero();  // drone xy in the rover frame at motor-off
    double z = 0.0;                        // altitude frozen at motor-off
};

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

SimTrace run(const Scenario& sc) {
    {
        const auto violations = sc.validate();
        if (!violations.empty()) {
            std::string msg = "invalid scenario:";
            for (const auto& v : violations) msg += "\n  - " + v;
            throw ScenarioError(msg, violations);
        }
    }

    SimTrace trace;
    trace.scenario = sc;
    trace.seed = sc.seed;
    trace.scenario_hash = hash_hex(scenario_hash(sc));

    RngStream rng(sc.seed);
    std::vector<AgentState> drones;
    for (const auto& d : sc.drones) drones.push_back(AgentState{d.id, d.position});
    RoverState rover{sc.rover.pose, 0.0, 0.0, sc.rover.pad_height};
    const RoverMission rover_mission = sc.rover_mission();
    MissionExecutive exec(sc.mission_params, sc.formation, sc.camera.mount_offset);
    const int leader_id = sc.formation.leader_id();

    const double frame_period = 1.0 / sc.camera.rate;
    double next_frame = 0.0;
    std::deque<PendingObservation> pending;
    std::map<int, Attachment> attached;

    auto leader_state = [&]() -> const AgentState& {
        for (const auto& d : drones) {
            if (d.id == leader_id) return d;
        }
        throw std::logic_error("leader drone missing");
    };

    long total_steps = std::lround(sc.duration / sc.dt);
    if (total_steps < 1) total_steps = 1;
    long end_step = total_steps;
    const long grace_steps = std::lround(1.0 / sc.dt);
    MissionPhase prev_phase = exec.phase().phase;

    for (long k = 0; k < end_step; ++k) {
        const double t = static_cast<double>(k) * sc.dt;
        const double t_next = t + sc.dt;

        // Coherent sensing snapshot before anything moves this step.
        const RoverState rover_snapshot = rover;
        const AgentState leader_snapshot = leader_state();

        // (1) rover
        rover = rover_step(rover, rover_mission.command_at(t), sc.dt);

        // (2) vision: camera frames are due on the tick grid at the camera rate
        std::optional<TagObservation> captured;
        if (next_frame <= t + 1e-9) {
            const TagPose tag{rover_snapshot.pose, sc.rover.tag_height};
            captured = detect_tag(leader_snapshot, tag, sc.camera, sc.noise, rng, t);
            if (captured) {
                pending.push_back({t, t + sc.camera.latency, leader_snapshot, *captured});
            }
            next_frame += frame_period;
        }
        while (!pending.empty() && pending.front().t_delivery <= t + 1e-9) {
            exec.deliver(t, pending.front().leader_at_capture, pending.front().obs);
            pending.pop_front();
        }

        // (3) mission update on the still-flying agents
        std::vector<AgentState> flying;
        for (const auto& d : drones) {
            if (!attached.count(d.id)) flying.push_back(d);
        }
        const MissionCommand cmd = exec.step(t, flying);

        if (cmd.phase.phase != prev_phase) {
            trace.events.push_back(
                {t, "phase_change", -1, to_string(prev_phase), to_string(cmd.phase.phase)});
            if (cmd.phase.phase == MissionPhase::Touchdown) {
                trace.time_to_land = t;
                end_step = std::min(end_step, k + 1 + grace_steps);
            }
            if (cmd.phase.phase == MissionPhase::Aborted) {
                trace.events.push_back({t, "abort", -1, to_string(prev_phase), "Aborted"});
                trace.aborted = true;
            }
            prev_phase = cmd.phase.phase;
        }

        // Motor-off: freeze and re-parent to the pad frame.
        for (int id : cmd.touchdown_ids) {
            for (auto& d : drones) {
                if (d.id != id) continue;
                const Eigen::Rotation2Dd inv(-rover_snapshot.pose.theta);
                Attachment at;
                at.pad_frame_offset =
                    inv * (Vec2(d.position.x(), d.position.y()) - rover_snapshot.pose.position());
                at.z = d.position.z();
                attached.emplace(id, at);
                d.motors_on = false;

                SimEvent ev{t, "touchdown", id};
                const auto est = exec.tracker().extrapolated(t);
                const auto true_targets =
                    slot_targets(rover_snapshot.pose, sc.formation, d.position.z());
                if (est) {
                    const auto est_targets =
                        slot_targets(est->pose, sc.formation, d.position.z());
                    ev.est_error = horizontal_distance(d.position, est_targets.at(id));
                }
                ev.true_error = horizontal_distance(d.position, true_targets.at(id));
                trace.events.push_back(ev);
            }
        }

        // (4)+(5) plan and step every still-flying drone from the same pre-step
        // state; landed drones ride the pad.
        std::vector<AgentState> next_states = drones;
        for (std::size_t i = 0; i < drones.size(); ++i) {
            const AgentState& d = drones[i];
            const auto attachment = attached.find(d.id);
            if (attachment == attached.end()) {
                std::vector<apf::Obstacle> obstacles;
                for (const auto& other : drones) {
                    if (other.id != d.id && !attached.count(other.id)) {
                        obstacles.push_back({other.id, other.position});
                    }
                }
                const auto goal = cmd.goals.find(d.id);
                const Vec3 target = goal != cmd.goals.end() ? goal->second : d.position;
                const Vec3 setpoint =
                    apf::plan_step(d, target, obstacles, sc.apf_params) + cmd.feedforward;
                next_states[i] = drone_step(d, setpoint, sc.drone_params, sc.dt);
            } else {
                const Vec2 xy = rover.pose.position() +
                                rover.pose.rotation() * attachment->second.pad_frame_offset;
                AgentState landed = d;
                landed.motors_on = false;
                landed.velocity =
                    (Vec3(xy.x(), xy.y(), attachment->second.z) - d.position) / sc.dt;
                landed.position = Vec3(xy.x(), xy.y(), attachment->second.z);
                next_states[i] = landed;
            }
        }
        drones = std::move(next_states);

        // (6) record the post-step world
        TickRecord rec;
        rec.t = t_next;
        rec.drones = drones;
        rec.rover = rover;
        rec.phase = exec.phase().phase;
        rec.observation = captured;
        trace.ticks.push_back(std::move(rec));

        if (exec.phase().phase == MissionPhase::Aborted) break;
    }

    trace.all_landed = attached.size() == drones.size() && !drones.empty();
    return trace;
}

unsigned batch_threads() {
    const char* env = std::getenv("SWARMSIM_THREADS");
    if (env == nullptr) {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1u : hw;
    }
    const long v = std::strtol(env, nullptr, 10);
    if (v <= 1) return 1u;
    return static_cast<unsigned>(v);
}

std::vector<SimTrace> run_batch(const Scenario& scenario, int n_runs, std::uint64_t seed_base) {
    if (n_runs < 1) throw std::invalid_argument("run_batch: n_runs must be >= 1");

    std::vector<SimTrace> out(n_runs);
    const unsigned threads =
        std::min<unsigned>(batch_threads(), static_cast<unsigned>(n_runs));

    if (threads <= 1) {
        for (int i = 0; i < n_runs; ++i) {
            Scenario sc = scenario;
            sc.seed = seed_base + static_cast<std::uint64_t>(i);
            out[i] = run(sc);
        }
        return out;
    }

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1)) {
            try {
                Scenario sc = scenario;
                sc.seed = seed_base + static_cast<std::uint64_t>(i);
                out[i] = run(sc);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace swarmsim
