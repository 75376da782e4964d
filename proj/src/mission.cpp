#include "swarmsim/mission.hpp"

#include <algorithm>
#include <cmath>

namespace swarmsim {

const char* to_string(MissionPhase phase) {
    switch (phase) {
        case MissionPhase::Search: return "Search";
        case MissionPhase::Follow: return "Follow";
        case MissionPhase::Descend: return "Descend";
        case MissionPhase::Touchdown: return "Touchdown";
        case MissionPhase::Aborted: return "Aborted";
    }
    return "?";
}

PadPoseEstimate estimate_pad_pose(const AgentState& leader, const TagObservation& obs,
                                  const Vec3& mount_offset) {
    const Vec3 tag_world = leader.position + mount_offset + obs.relative_position;
    PadPoseEstimate est;
    est.pose = Pose2D{tag_world.x(), tag_world.y(), normalize_angle(obs.tag_yaw)};
    est.height = tag_world.z();
    return est;
}

void PadTracker::push(double t_delivery, const AgentState& leader_at_capture,
                      const TagObservation& obs) {
    const PadPoseEstimate est = estimate_pad_pose(leader_at_capture, obs, mount_);

    // Composition with the capture-time leader pose removes the camera's own
    // motion; the world-frame track moves only with the pad.
    TagObservation sample;
    sample.timestamp = obs.timestamp;
    sample.relative_position = Vec3(est.pose.x, est.pose.y, est.height);
    sample.tag_yaw = est.pose.theta;
    world_track_.push_back(sample);
    while (static_cast<int>(world_track_.size()) > std::max(2, params_.velocity_window_frames)) {
        world_track_.pop_front();
    }

    recent_.emplace_back(t_delivery, est);
    while (static_cast<int>(recent_.size()) > std::max(1, params_.anchor_smoothing_frames)) {
        recent_.pop_front();
    }

    if (world_track_.size() >= 2) {
        const std::vector<TagObservation> track(world_track_.begin(), world_track_.end());
        const Vec2 raw = compensated_tag_velocity(track).head<2>();
        if (!velocity_primed_) {
            velocity_ = raw;
            velocity_primed_ = true;
        } else {
            const double a = params_.velocity_filter_alpha;
            velocity_ = (1.0 - a) * velocity_ + a * raw;
        }
    }

    // Anchor: recent estimates projected to the delivery time with the current
    // velocity, averaged (circular mean for yaw).
    Vec2 mean_xy = Vec2::Zero();
    double mean_h = 0.0;
    double sin_sum = 0.0;
    double cos_sum = 0.0;
    for (const auto& [t_i, est_i] : recent_) {
        mean_xy += est_i.pose.position() + velocity_ * (t_delivery - t_i);
        mean_h += est_i.height;
        sin_sum += std::sin(est_i.pose.theta);
        cos_sum += std::cos(est_i.pose.theta);
    }
    const double inv_n = 1.0 / static_cast<double>(recent_.size());
    anchor_pose_.x = mean_xy.x() * inv_n;
    anchor_pose_.y = mean_xy.y() * inv_n;
    anchor_pose_.theta = std::atan2(sin_sum, cos_sum);
    anchor_height_ = mean_h * inv_n;
    anchor_time_ = t_delivery;
    anchored_ = true;
}

double PadTracker::age(double now) const {
    if (!anchored_) return std::numeric_limits<double>::infinity();
    return now - anchor_time_;
}

std::optional<PadEstimate> PadTracker::extrapolated(double now) const {
    if (!anchored_) return std::nullopt;
    PadEstimate est;
    const Vec2 xy = anchor_pose_.position() + velocity_ * (now - anchor_time_);
    est.pose = Pose2D{xy.x(), xy.y(), anchor_pose_.theta};
    est.height = anchor_height_;
    est.velocity = velocity_;
    return est;
}

namespace {

// Hover in place at the search altitude; used whenever no pad estimate is
// available.
std::map<int, Vec3> hold_goals(const std::vector<AgentState>& swarm, double altitude) {
    std::map<int, Vec3> goals;
    for (const AgentState& s : swarm) {
        goals.emplace(s.id, Vec3(s.position.x(), s.position.y(), altitude));
    }
    return goals;
}

PhaseState enter(MissionPhase phase, double now, double descend_start_z = 0.0) {
    return PhaseState{phase, now, descend_start_z};
}

}  // namespace

MissionCommand mission_update(const PhaseState& phase, const std::vector<AgentState>& swarm,
                              const std::optional<PadEstimate>& pad, const MissionParams& params,
                              const FormationSpec& formation, double now) {
    MissionCommand cmd;
    cmd.phase = phase;

    switch (phase.phase) {
        case MissionPhase::Search: {
            if (pad) {
                cmd.phase = enter(MissionPhase::Follow, now);
                cmd.goals = slot_targets(pad->pose, formation, pad->height + params.follow_altitude);
                cmd.feedforward = Vec3(pad->velocity.x(), pad->velocity.y(), 0.0);
            } else if (now - phase.entered_at >= params.search_timeout) {
                cmd.phase = enter(MissionPhase::Aborted, now);
            } else {
                cmd.goals = hold_goals(swarm, params.follow_altitude);
            }
            break;
        }
        case MissionPhase::Follow: {
            if (!pad) {
                cmd.phase = enter(MissionPhase::Search, now);
                cmd.goals = hold_goals(swarm, params.follow_altitude);
                break;
            }
            const auto targets =
                slot_targets(pad->pose, formation, pad->height + params.follow_altitude);
            cmd.feedforward = Vec3(pad->velocity.x(), pad->velocity.y(), 0.0);
            if (formation_error(swarm, targets) <= params.landing_threshold) {
                double top = pad->height + params.touchdown_tolerance;
                for (const AgentState& s : swarm) top = std::max(top, s.position.z());
                top = std::min(top, pad->height + params.follow_altitude);
                cmd.phase = enter(MissionPhase::Descend, now, top);
                cmd.goals = slot_targets(pad->pose, formation, top);
            } else {
                cmd.goals = targets;
            }
            break;
        }
        case MissionPhase::Descend: {
            if (!pad) {
                cmd.phase = enter(MissionPhase::Follow, now);
                cmd.goals = hold_goals(swarm, params.follow_altitude);
                break;
            }
            cmd.feedforward = Vec3(pad->velocity.x(), pad->velocity.y(), 0.0);
            const double ramp_z = std::max(
                pad->height, phase.descend_start_z - params.descent_rate * (now - phase.entered_at));
            const auto targets = slot_targets(pad->pose, formation, ramp_z);
            if (formation_error(swarm, targets) > params.landing_threshold) {
                // Threshold lost: climb back to the follow altitude.
                cmd.phase = enter(MissionPhase::Follow, now);
                cmd.goals =
                    slot_targets(pad->pose, formation, pad->height + params.follow_altitude);
                break;
            }
            for (const AgentState& s : swarm) {
                const auto it = targets.find(s.id);
                const bool down = s.position.z() <= pad->height + params.touchdown_tolerance;
                const bool centered =
                    horizontal_distance(s.position, it->second) <= params.landing_threshold;
                if (down && centered) {
                    cmd.touchdown_ids.push_back(s.id);
                } else {
                    cmd.goals.emplace(s.id, it->second);
                }
            }
            if (cmd.touchdown_ids.size() == swarm.size()) {
                cmd.phase = enter(MissionPhase::Touchdown, now);
            }
            break;
        }
        case MissionPhase::Touchdown:
        case MissionPhase::Aborted:
            break;  // absorbing
    }
    return cmd;
}

MissionCommand MissionExecutive::step(double now, const std::vector<AgentState>& flying) {
    const auto pad = usable_estimate(now);
    MissionCommand cmd = mission_update(phase_, flying, pad, params_, formation_, now);
    phase_ = cmd.phase;
    return cmd;
}

std::optional<PadEstimate> MissionExecutive::usable_estimate(double now) const {
    if (!tracker_.has_estimate()) return std::nullopt;
    // The tag is physically undetectable below the camera's minimum range, so
    // the final approach completes on dead reckoning: no expiry in Descend.
    if (phase_.phase != MissionPhase::Descend &&
        tracker_.age(now) > params_.estimate_hold_timeout) {
        return std::nullopt;
    }
    return tracker_.extrapolated(now);
}

}  // namespace swarmsim
