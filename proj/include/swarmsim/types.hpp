// Shared geometric value types. World frame is z-up, meters, radians.
// Drones are 3D point masses; the rover pose is planar.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swarmsim {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = std::numbers::pi;

// Maps any finite angle into (-pi, pi].
inline double normalize_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("normalize_angle: angle must be finite");
    }
    double r = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

inline double horizontal_distance(const Vec3& a, const Vec3& b) {
    return (a.head<2>() - b.head<2>()).norm();
}

// Planar pose; theta is kept in (-pi, pi].
struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec2 position() const { return {x, y}; }
    Eigen::Rotation2Dd rotation() const { return Eigen::Rotation2Dd(theta); }

    bool operator==(const Pose2D&) const = default;
};

struct AgentState {
    int id = 0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    bool motors_on = true;
};

struct RoverState {
    Pose2D pose;
    double linear_speed = 0.0;   // m/s
    double angular_speed = 0.0;  // rad/s
    double pad_height = 0.70;    // m, landing pad surface above ground
};

}  // namespace swarmsim
