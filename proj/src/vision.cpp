#include "swarmsim/vision.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmsim {

std::optional<TagObservation> detect_tag(const AgentState& leader, const TagPose& tag,
                                         const CameraModel& cam, const NoiseModel& noise,
                                         RngStream& rng, double t) {
    // Fixed draw cadence: consume all randomness before gating.
    const double u_drop = rng.uniform();
    const double nx = rng.normal();
    const double ny = rng.normal();
    const double nz = rng.normal();
    const double nyaw = rng.normal();

    const Vec3 camera_pos = leader.position + cam.mount_offset;
    const Vec3 tag_pos(tag.pose.x, tag.pose.y, tag.height);
    const Vec3 rel = tag_pos - camera_pos;
    const double range = rel.norm();
    if (range < cam.min_range || range > cam.max_range) return std::nullopt;

    const double elevation = std::atan2(std::abs(rel.z()), rel.head<2>().norm());
    if (elevation > cam.fov_half_angle) return std::nullopt;

    if (u_drop < noise.dropout_prob) return std::nullopt;

    TagObservation obs;
    obs.timestamp = t;
    obs.relative_position = rel + noise.sigma_pos * Vec3(nx, ny, nz);
    obs.tag_yaw = normalize_angle(tag.pose.theta + noise.sigma_yaw * nyaw);
    return obs;
}

RigidTransform2D estimate_rigid_transform(const std::vector<Vec2>& points_prev,
                                          const std::vector<Vec2>& points_curr) {
    const std::size_t n = points_prev.size();
    if (n != points_curr.size())
        throw std::invalid_argument("estimate_rigid_transform: point sets differ in size");
    if (n < 2)
        throw std::invalid_argument("estimate_rigid_transform: need at least 2 correspondences");

    Vec2 centroid_prev = Vec2::Zero();
    Vec2 centroid_curr = Vec2::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        centroid_prev += points_prev[i];
        centroid_curr += points_curr[i];
    }
    centroid_prev /= static_cast<double>(n);
    centroid_curr /= static_cast<double>(n);

    // Angle maximizing sum cos(theta) dot + sin(theta) cross over centered pairs.
    double sum_dot = 0.0;
    double sum_cross = 0.0;
    double spread_prev = 0.0;
    double spread_curr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = points_prev[i] - centroid_prev;
        const Vec2 q = points_curr[i] - centroid_curr;
        sum_dot += p.dot(q);
        sum_cross += p.x() * q.y() - p.y() * q.x();
        spread_prev += p.squaredNorm();
        spread_curr += q.squaredNorm();
    }
    if (spread_prev == 0.0 || spread_curr == 0.0)
        throw std::invalid_argument("estimate_rigid_transform: degenerate point set");

    RigidTransform2D result;
    result.rotation = std::atan2(sum_cross, sum_dot);
    const Eigen::Rotation2Dd rot(result.rotation);
    result.translation = centroid_curr - rot * centroid_prev;

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss += (rot * points_prev[i] + result.translation - points_curr[i]).squaredNorm();
    }
    result.rms_residual = std::sqrt(ss / static_cast<double>(n));
    return result;
}

Vec3 compensated_tag_velocity(const std::vector<TagObservation>& observations) {
    if (observations.size() < 2)
        throw std::invalid_argument("compensated_tag_velocity: need at least 2 observations");
    Vec3 mean = Vec3::Zero();
    int count = 0;
    for (std::size_t i = 1; i < observations.size(); ++i) {
        const double dt = observations[i].timestamp - observations[i - 1].timestamp;
        if (dt <= 0.0)
            throw std::invalid_argument(
                "compensated_tag_velocity: timestamps must be strictly increasing");
        mean += (observations[i].relative_position - observations[i - 1].relative_position) / dt;
        ++count;
    }
    return mean / static_cast<double>(count);
}

}  // namespace swarmsim
