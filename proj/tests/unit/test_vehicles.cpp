#include <random>

#include "doctest.h"
#include "swarmsim/vehicles.hpp"

using namespace swarmsim;

TEST_CASE("drone velocity fixed point advances the position") {
    DroneParams params;
    AgentState s{0, Vec3(0, 0, 1), Vec3(0.5, -0.2, 0.1)};
    const auto next = drone_step(s, s.velocity, params, 0.01);
    CHECK(next.velocity.isApprox(s.velocity, 1e-15));
    CHECK(next.position.isApprox(s.position + s.velocity * 0.01, 1e-15));
}

TEST_CASE("setpoints are clamped per axis group") {
    DroneParams params;
    params.v_max_xy = 2.0;
    params.v_max_z = 1.0;
    const Vec3 clamped = clamp_setpoint(Vec3(10, 0, 0), params);
    CHECK(clamped.isApprox(Vec3(2, 0, 0), 1e-15));
    CHECK(clamp_setpoint(Vec3(0, 0, -5), params).z() == -1.0);

    // tau -> 0: the velocity reaches the clamped setpoint within one step
    params.response_tau = 1e-9;
    AgentState s{0, Vec3::Zero(), Vec3::Zero()};
    const auto next = drone_step(s, Vec3(10, 0, 0), params, 0.01);
    CHECK(next.velocity.isApprox(Vec3(2, 0, 0), 1e-12));
}

TEST_CASE("hover is energy free") {
    DroneParams params;
    AgentState s{0, Vec3(1, 1, 1), Vec3::Zero()};
    for (int i = 0; i < 1000; ++i) s = drone_step(s, Vec3::Zero(), params, 0.01);
    CHECK(s.position.isApprox(Vec3(1, 1, 1), 1e-15));
}

TEST_CASE("speed clamps hold after arbitrary steps") {
    DroneParams params;
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> v(-20.0, 20.0);
    AgentState s{0, Vec3::Zero(), Vec3::Zero()};
    for (int i = 0; i < 2000; ++i) {
        s = drone_step(s, Vec3(v(gen), v(gen), v(gen)), params, 0.01);
        CHECK(s.velocity.head<2>().norm() <= params.v_max_xy + 1e-12);
        CHECK(std::abs(s.velocity.z()) <= params.v_max_z + 1e-12);
    }
}

TEST_CASE("motors off freezes the state") {
    DroneParams params;
    AgentState s{0, Vec3(1, 2, 3), Vec3(1, 0, 0), false};
    const auto next = drone_step(s, Vec3(5, 5, 5), params, 0.01);
    CHECK(next.position == s.position);
    CHECK(next.velocity == s.velocity);
}

TEST_CASE("rover straight line") {
    RoverState r;
    const auto next = rover_step(r, {1.5, 0.0}, 0.01);
    CHECK(next.pose.x == doctest::Approx(0.015).epsilon(1e-12));
    CHECK(next.pose.y == 0.0);

    const auto still = rover_step(r, {0.0, 0.0}, 0.5);
    CHECK(still.pose.x == r.pose.x);
    CHECK(still.pose.theta == r.pose.theta);
}

TEST_CASE("rover half circle arc") {
    RoverState r;
    const auto next = rover_step(r, {1.0, kPi}, 1.0);
    CHECK(next.pose.theta == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(next.pose.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(next.pose.y == doctest::Approx(2.0 / kPi).epsilon(1e-12));
}

TEST_CASE("arc integrator is continuous at omega -> 0") {
    std::mt19937 gen(37);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int i = 0; i < 200; ++i) {
        RoverState r;
        r.pose.theta = angle(gen);
        const auto arc = rover_step(r, {1.0, 1e-12}, 0.01);
        const auto line = rover_step(r, {1.0, 0.0}, 0.01);
        CHECK(std::abs(arc.pose.x - line.pose.x) < 1e-9);
        CHECK(std::abs(arc.pose.y - line.pose.y) < 1e-9);
    }
}

TEST_CASE("straight line mission kinematics") {
    auto integrate = [](const RoverMission& mission, double dt, double total) {
        RoverState r;
        r.pose.theta = mission.heading;
        const long steps = std::lround(total / dt);
        for (long k = 0; k < steps; ++k) {
            r = rover_step(r, mission.command_at(k * dt), dt);
        }
        return r;
    };

    const auto m1 = straight_line_mission(1.0, 0.0, 10.0);
    CHECK(integrate(m1, 0.01, 10.0).pose.x == doctest::Approx(10.0).epsilon(1e-9));

    const auto still = straight_line_mission(0.0, 0.0, 10.0);
    CHECK(integrate(still, 0.01, 10.0).pose.x == 0.0);

    const auto m2 = straight_line_mission(0.5, 0.0, 4.0);
    CHECK(integrate(m2, 0.01, 8.0).pose.x == doctest::Approx(2.0).epsilon(1e-9));

    CHECK_THROWS_AS(straight_line_mission(-1.0, 0.0, 1.0), std::invalid_argument);
}
