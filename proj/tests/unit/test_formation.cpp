#include <random>

#include "doctest.h"
#include "swarmsim/formation.hpp"

using namespace swarmsim;

namespace {

FormationSpec delta() {
    FormationSpec spec;
    spec.offsets = {{0, Vec2(0, 0)}, {1, Vec2(0, 0.3)}, {2, Vec2(0, -0.3)}};
    return spec;
}

}  // namespace

TEST_CASE("slot targets at identity pose") {
    const auto targets = slot_targets(Pose2D{}, delta(), 1.0);
    CHECK(targets.at(0).isApprox(Vec3(0, 0, 1)));
    CHECK(targets.at(1).isApprox(Vec3(0, 0.3, 1)));
    CHECK(targets.at(2).isApprox(Vec3(0, -0.3, 1)));
}

TEST_CASE("slot targets rotate with the pad") {
    const auto flipped = slot_targets(Pose2D{0, 0, kPi}, delta(), 1.0);
    CHECK(flipped.at(1).isApprox(Vec3(0, -0.3, 1), 1e-12));

    const auto quarter = slot_targets(Pose2D{1, 0, kPi / 2}, delta(), 1.0);
    CHECK(quarter.at(1).isApprox(Vec3(0.7, 0, 1), 1e-12));
}

TEST_CASE("slot targets are equivariant under planar rigid motion") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    const auto spec = delta();
    for (int i = 0; i < 200; ++i) {
        const Pose2D pose{coord(gen), coord(gen), angle(gen)};
        const double dtheta = angle(gen);
        const Vec2 shift(coord(gen), coord(gen));
        const Eigen::Rotation2Dd rot(dtheta);

        const Vec2 moved_xy = rot * pose.position() + shift;
        const Pose2D moved{moved_xy.x(), moved_xy.y(), normalize_angle(pose.theta + dtheta)};

        const auto base = slot_targets(pose, spec, 1.0);
        const auto transformed = slot_targets(moved, spec, 1.0);
        for (const auto& [id, target] : base) {
            const Vec2 expect = rot * target.head<2>() + shift;
            CHECK(transformed.at(id).head<2>().isApprox(expect, 1e-9));
            CHECK(transformed.at(id).z() == target.z());
        }

        // rigid formation: pairwise distances do not depend on the pose
        for (auto a = base.begin(); a != base.end(); ++a) {
            for (auto b = std::next(a); b != base.end(); ++b) {
                const double d0 = (a->second - b->second).norm();
                const double d1 = (transformed.at(a->first) - transformed.at(b->first)).norm();
                CHECK(d0 == doctest::Approx(d1).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("formation error is the max horizontal deviation") {
    const auto targets = slot_targets(Pose2D{}, delta(), 1.0);
    std::vector<AgentState> agents = {
        {0, Vec3(0, 0, 1)}, {1, Vec3(0, 0.3, 1)}, {2, Vec3(0, -0.3, 1)}};
    CHECK(formation_error(agents, targets) == 0.0);

    agents[1].position += Vec3(0.2, 0, 0);
    CHECK(formation_error(agents, targets) == doctest::Approx(0.2));

    agents[1].position = Vec3(0, 0.3, 5.0);  // purely vertical offset is ignored
    CHECK(formation_error(agents, targets) == 0.0);
}

TEST_CASE("formation error requires a target per agent") {
    const auto targets = slot_targets(Pose2D{}, delta(), 1.0);
    const std::vector<AgentState> agents = {{7, Vec3(0, 0, 1)}};
    CHECK_THROWS_AS(formation_error(agents, targets), std::invalid_argument);
}

TEST_CASE("formation validation") {
    FormationSpec spec = delta();
    CHECK(spec.validate(0.08).empty());
    CHECK(spec.leader_id() == 0);

    spec.offsets[1] = Vec2(0, 0.1);  // closer than 2 * 0.08 to the leader
    CHECK(!spec.validate(0.08).empty());

    FormationSpec no_leader;
    no_leader.offsets = {{0, Vec2(0, 0.3)}, {1, Vec2(0, -0.3)}};
    CHECK(!no_leader.validate(0.08).empty());
    CHECK_THROWS_AS(no_leader.leader_id(), std::logic_error);
}
