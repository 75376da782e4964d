// Discrete-time motion models: velocity-setpoint drone (first-order velocity
// response, separate horizontal/vertical speed clamps) and differential-drive
// rover with exact arc integration.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "swarmsim/types.hpp"

namespace swarmsim {

struct DroneParams {
    double v_max_xy = 2.0;         // m/s horizontal clamp
    double v_max_z = 1.0;          // m/s vertical clamp
    double response_tau = 0.15;    // s, first-order velocity tracking constant
    double collision_radius = 0.08;  // m
};

struct RoverCommand {
    double linear = 0.0;   // m/s
    double angular = 0.0;  // rad/s
};

inline Vec3 clamp_setpoint(const Vec3& setpoint, const DroneParams& params) {
    Vec3 out = setpoint;
    const double xy = out.head<2>().norm();
    if (xy > params.v_max_xy) out.head<2>() *= params.v_max_xy / xy;
    if (out.z() > params.v_max_z) out.z() = params.v_max_z;
    if (out.z() < -params.v_max_z) out.z() = -params.v_max_z;
    return out;
}

// Exact exponential velocity update toward the clamped setpoint, then the new
// velocity is integrated over dt. Motors off freezes the state; the sim engine
// re-parents landed drones to the pad.
inline AgentState drone_step(const AgentState& state, const Vec3& setpoint,
                             const DroneParams& params, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("drone_step: dt must be positive");
    if (!state.motors_on) return state;
    const Vec3 target = clamp_setpoint(setpoint, params);
    const double alpha = std::exp(-dt / params.response_tau);
    AgentState next = state;
    next.velocity = target + (state.velocity - target) * alpha;
    next.position = state.position + next.velocity * dt;
    return next;
}

namespace detail {
inline double sinc(double u) {
    if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
}
}  // namespace detail

// Unicycle update. The midpoint/sinc form equals the exact arc
//   x += v/w (sin(theta + w dt) - sin theta)
// for any w and degrades smoothly to the straight-line formula as w -> 0.
inline RoverState rover_step(const RoverState& state, const RoverCommand& cmd, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("rover_step: dt must be positive");
    const double half_turn = 0.5 * cmd.angular * dt;
    const double mid = state.pose.theta + half_turn;
    const double scale = cmd.linear * dt * detail::sinc(half_turn);
    RoverState next = state;
    next.pose.x += scale * std::cos(mid);
    next.pose.y += scale * std::sin(mid);
    next.pose.theta = normalize_angle(state.pose.theta + cmd.angular * dt);
    next.linear_speed = cmd.linear;
    next.angular_speed = cmd.angular;
    return next;
}

// Constant straight-line drive, the moving-platform profile of the
// experiments. heading fixes the rover's initial yaw; commands stop after
// duration.
struct RoverMission {
    double speed = 0.0;
    double heading = 0.0;
    double duration = std::numeric_limits<double>::infinity();

    RoverCommand command_at(double t) const {
        if (t < 0.0 || t >= duration) return {0.0, 0.0};
        return {speed, 0.0};
    }
};

inline RoverMission straight_line_mission(double speed, double heading, double duration) {
    if (speed < 0.0) throw std::invalid_argument("straight_line_mission: speed must be >= 0");
    return RoverMission{speed, heading, duration};
}

}  // namespace swarmsim
