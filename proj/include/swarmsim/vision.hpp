// Synthetic stand-in for the leader's fiducial-tag pipeline: a range- and
// FOV-gated, noise-corrupted relative pose of the pad tag, plus the 2-D
// point-set rigid-transform estimator used for motion compensation.
#pragma once

#include <optional>
#include <vector>

#include "swarmsim/rng.hpp"
#include "swarmsim/types.hpp"

namespace swarmsim {

struct CameraModel {
    Vec3 mount_offset = Vec3::Zero();  // camera position in the leader body frame
    double fov_half_angle = 0.5 * kPi;  // elevation gate, rad (yaw-gimballed camera)
    double min_range = 0.30;           // m
    double max_range = 4.0;            // m
    double rate = 30.0;                // Hz
    double latency = 0.06;             // s, capture-to-delivery pipeline delay
};

struct NoiseModel {
    double sigma_pos = 0.0;     // m, per-axis Gaussian on the relative position
    double sigma_yaw = 0.0;     // rad
    double dropout_prob = 0.0;  // per-frame missed detection probability
};

// Relative tag pose as the camera reports it. relative_position is the tag
// center minus the camera position, world-axis aligned (agent heading is not
// simulated; the camera gimbals in yaw). timestamp is the capture time.
struct TagObservation {
    double timestamp = 0.0;
    Vec3 relative_position = Vec3::Zero();
    double tag_yaw = 0.0;
};

// World-frame tag: planar pose of the marker plus the height of its center.
struct TagPose {
    Pose2D pose;
    double height = 0.70;
};

// One camera frame. Returns nothing outside [min_range, max_range], outside
// the elevation FOV, or when dropout fires. The five noise draws are consumed
// on every call so the stream stays comparable across scenario variants.
std::optional<TagObservation> detect_tag(const AgentState& leader, const TagPose& tag,
                                         const CameraModel& cam, const NoiseModel& noise,
                                         RngStream& rng, double t);

struct RigidTransform2D {
    double rotation = 0.0;  // rad, counterclockwise
    Vec2 translation = Vec2::Zero();
    double rms_residual = 0.0;
};

// Least-squares rigid transform (rotation + translation, no scale) mapping
// points_prev onto points_curr; closed-form 2-D orthogonal Procrustes.
RigidTransform2D estimate_rigid_transform(const std::vector<Vec2>& points_prev,
                                          const std::vector<Vec2>& points_curr);

// Finite-difference velocity of the tag relative position, smoothed as the
// mean of the per-interval differences over the supplied observations.
Vec3 compensated_tag_velocity(const std::vector<TagObservation>& observations);

}  // namespace swarmsim
