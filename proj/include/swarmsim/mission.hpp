// Swarm-level landing state machine: acquire the tag, follow the platform in
// formation at a fixed altitude, descend in formation once within the landing
// threshold, motor-off per agent at touchdown.
#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmsim/formation.hpp"
#include "swarmsim/types.hpp"
#include "swarmsim/vision.hpp"

namespace swarmsim {

enum class MissionPhase { Search, Follow, Descend, Touchdown, Aborted };

const char* to_string(MissionPhase phase);

struct MissionParams {
    double follow_altitude = 1.0;      // m above the pad while tracking
    double landing_threshold = 0.10;   // m, max formation error to start descending
    double touchdown_tolerance = 0.03; // m above the pad surface at motor-off
    double descent_rate = 0.4;         // m/s
    double search_timeout = 5.0;       // s without acquisition before aborting
    double estimate_hold_timeout = 0.5;   // s of dropout tolerated while following
    int velocity_window_frames = 60;      // observations used for the velocity estimate
    int anchor_smoothing_frames = 10;     // estimates averaged into the pose anchor
    double velocity_filter_alpha = 0.05;  // per-frame EMA weight on the velocity
};

// World-frame pad pose recovered from one observation (mocap leader pose
// composed with the camera-relative tag pose).
struct PadPoseEstimate {
    Pose2D pose;
    double height = 0.0;  // world z of the pad surface (tag center)
};

PadPoseEstimate estimate_pad_pose(const AgentState& leader, const TagObservation& obs,
                                  const Vec3& mount_offset);

// Pad estimate the state machine consumes: anchored pose plus the planar
// velocity used to extrapolate it between frames.
struct PadEstimate {
    Pose2D pose;
    double height = 0.0;
    Vec2 velocity = Vec2::Zero();
};

// Fuses delivered tag observations into a smoothed, dead-reckonable pad
// estimate. Observations are anchored at their delivery time: the consumer
// does not back-correct for pipeline latency, so a moving pad is seen
// latency * speed behind truth, as in the real 30 fps pipeline.
class PadTracker {
public:
    PadTracker(const MissionParams& params, const Vec3& camera_mount)
        : params_(params), mount_(camera_mount) {}

    void push(double t_delivery, const AgentState& leader_at_capture, const TagObservation& obs);

    bool has_estimate() const { return anchored_; }
    double age(double now) const;  // s since the last delivery; +inf when empty
    std::optional<PadEstimate> extrapolated(double now) const;
    Vec2 pad_velocity() const { return velocity_; }

private:
    MissionParams params_;
    Vec3 mount_;
    // World-frame pad estimates as a capture-stamped track; differentiating it
    // gives the camera-motion-compensated pad velocity.
    std::deque<TagObservation> world_track_;
    std::deque<std::pair<double, PadPoseEstimate>> recent_;  // delivery time + estimate
    bool anchored_ = false;
    bool velocity_primed_ = false;
    double anchor_time_ = 0.0;
    Pose2D anchor_pose_;
    double anchor_height_ = 0.0;
    Vec2 velocity_ = Vec2::Zero();
};

struct PhaseState {
    MissionPhase phase = MissionPhase::Search;
    double entered_at = 0.0;
    double descend_start_z = 0.0;  // altitude the descent ramp starts from
};

struct MissionCommand {
    PhaseState phase;
    std::map<int, Vec3> goals;        // flying agents only
    Vec3 feedforward = Vec3::Zero();  // shared goal velocity (pad motion)
    std::vector<int> touchdown_ids;   // agents to motor-off this tick
};

// One deterministic state-machine step. Pure function of its inputs; `swarm`
// holds the still-flying agents. Goals in Follow/Descend delegate to
// slot_targets at the current estimate.
MissionCommand mission_update(const PhaseState& phase, const std::vector<AgentState>& swarm,
                              const std::optional<PadEstimate>& pad, const MissionParams& params,
                              const FormationSpec& formation, double now);

// Engine-facing wrapper owning the tracker, the phase, and the Search hold
// positions.
class MissionExecutive {
public:
    MissionExecutive(const MissionParams& params, const FormationSpec& formation,
                     const Vec3& camera_mount = Vec3::Zero())
        : params_(params), formation_(formation), tracker_(params, camera_mount) {}

    void deliver(double t_delivery, const AgentState& leader_at_capture,
                 const TagObservation& obs) {
        tracker_.push(t_delivery, leader_at_capture, obs);
    }

    MissionCommand step(double now, const std::vector<AgentState>& flying);

    const PhaseState& phase() const { return phase_; }
    const PadTracker& tracker() const { return tracker_; }

private:
    std::optional<PadEstimate> usable_estimate(double now) const;

    MissionParams params_;
    FormationSpec formation_;
    PadTracker tracker_;
    PhaseState phase_;
};

}  // namespace swarmsim
