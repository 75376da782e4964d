// Artificial potential field planner.
//
// Total potential U = U_a + U_r with a quadratic attraction toward the goal
// and an inverse-distance repulsion from each obstacle that is exactly zero
// beyond the radius of influence d0. Velocity setpoints follow the negative
// gradient (first-order gradient flow), recomputed fresh every call.
#pragma once

#include <algorithm>
#include <vector>

#include "swarmsim/types.hpp"

namespace swarmsim::apf {

struct APFParams {
    double xi = 1.0;         // attraction scale
    double eta = 0.1;        // repulsion scale
    double d0 = 0.25;        // radius of influence, m
    double step_gain = 1.0;  // m/s per unit gradient
    double v_max = 2.0;      // setpoint norm clamp, m/s
    double rho_min = 1e-3;   // distance clamp, keeps the field total near rho = 0
};

struct Obstacle {
    int id = 0;
    Vec3 position = Vec3::Zero();
};

inline double attraction_potential(const Vec3& p, const Vec3& goal, const APFParams& params) {
    return params.xi * (p - goal).squaredNorm();
}

namespace detail {

// Contributions are summed in ascending obstacle id so the result does not
// depend on input order, bit for bit.
inline std::vector<const Obstacle*> sorted_by_id(const std::vector<Obstacle>& obstacles) {
    std::vector<const Obstacle*> sorted;
    sorted.reserve(obstacles.size());
    for (const auto& ob : obstacles) sorted.push_back(&ob);
    std::sort(sorted.begin(), sorted.end(), [](const Obstacle* a, const Obstacle* b) {
        if (a->id != b->id) return a->id < b->id;
        return std::lexicographical_compare(a->position.data(), a->position.data() + 3,
                                            b->position.data(), b->position.data() + 3);
    });
    return sorted;
}

}  // namespace detail

inline double repulsive_potential(const Vec3& p, const std::vector<Obstacle>& obstacles,
                                  const APFParams& params) {
    double u = 0.0;
    for (const Obstacle* ob : detail::sorted_by_id(obstacles)) {
        const double rho_true = (p - ob->position).norm();
        if (rho_true > params.d0) continue;  // outside the radius of influence: exactly 0
        const double rho = std::max(rho_true, params.rho_min);
        const double gap = 1.0 / rho - 1.0 / params.d0;
        u += 0.5 * params.eta * gap * gap;
    }
    return u;
}

inline double total_potential(const Vec3& p, const Vec3& goal,
                              const std::vector<Obstacle>& obstacles, const APFParams& params) {
    return attraction_potential(p, goal, params) + repulsive_potential(p, obstacles, params);
}

inline Vec3 potential_gradient(const Vec3& p, const Vec3& goal,
                               const std::vector<Obstacle>& obstacles, const APFParams& params) {
    Vec3 grad = 2.0 * params.xi * (p - goal);
    for (const Obstacle* ob : detail::sorted_by_id(obstacles)) {
        const Vec3 delta = p - ob->position;
        const double rho_true = delta.norm();
        if (rho_true > params.d0) continue;
        const double rho = std::max(rho_true, params.rho_min);
        const double gap = 1.0 / rho - 1.0 / params.d0;
        const Vec3 dir = rho_true > 0.0 ? Vec3(delta / rho_true) : Vec3::Zero();
        grad += -params.eta * gap / (rho * rho) * dir;
    }
    return grad;
}

// Velocity setpoint: descend the potential, clamped to v_max. Stateless; the
// path emerges from recomputing this every control tick.
inline Vec3 plan_step(const AgentState& state, const Vec3& goal,
                      const std::vector<Obstacle>& obstacles, const APFParams& params) {
    Vec3 setpoint = -params.step_gain * potential_gradient(state.position, goal, obstacles, params);
    const double norm = setpoint.norm();
    if (norm > params.v_max) setpoint *= params.v_max / norm;
    return setpoint;
}

}  // namespace swarmsim::apf
