// Delta formation geometry: fixed planar slot offsets in the pad frame,
// rotated and translated with the pad pose. The slot at the origin belongs to
// the leader.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmsim/types.hpp"

namespace swarmsim {

struct FormationSpec {
    std::map<int, Vec2> offsets;  // agent id -> pad-frame offset, m

    int leader_id() const {
        for (const auto& [id, off] : offsets) {
            if (off.isZero(0.0)) return id;
        }
        throw std::logic_error("FormationSpec: no leader slot at the origin");
    }

    // Violations as human-readable strings; empty means valid.
    std::vector<std::string> validate(double collision_radius) const {
        std::vector<std::string> errs;
        if (offsets.size() < 2) errs.push_back("formation needs at least two slots");
        int origin_slots = 0;
        for (const auto& [id, off] : offsets) {
            if (off.isZero(0.0)) ++origin_slots;
        }
        if (origin_slots != 1)
            errs.push_back("formation must have exactly one slot at the origin (the leader)");
        const double min_sep = 2.0 * collision_radius;
        for (auto a = offsets.begin(); a != offsets.end(); ++a) {
            for (auto b = std::next(a); b != offsets.end(); ++b) {
                const double d = (a->second - b->second).norm();
                if (d == 0.0) {
                    errs.push_back("formation slots " + std::to_string(a->first) + " and " +
                                   std::to_string(b->first) + " coincide");
                } else if (d <= min_sep) {
                    errs.push_back("formation slots " + std::to_string(a->first) + " and " +
                                   std::to_string(b->first) +
                                   " closer than twice the collision radius");
                }
            }
        }
        return errs;
    }
};

// World-frame goal per agent: offset rotated by the pad yaw, translated to the
// pad position, at the requested absolute altitude. Pairwise distances are
// preserved for any pad pose (rigid formation).
inline std::map<int, Vec3> slot_targets(const Pose2D& pad_pose, const FormationSpec& spec,
                                        double altitude) {
    std::map<int, Vec3> targets;
    const Eigen::Rotation2Dd rot = pad_pose.rotation();
    for (const auto& [id, offset] : spec.offsets) {
        const Vec2 xy = pad_pose.position() + rot * offset;
        targets.emplace(id, Vec3(xy.x(), xy.y(), altitude));
    }
    return targets;
}

// Maximum horizontal slot error over the given agents.
inline double formation_error(const std::vector<AgentState>& states,
                              const std::map<int, Vec3>& targets) {
    double worst = 0.0;
    for (const AgentState& s : states) {
        auto it = targets.find(s.id);
        if (it == targets.end()) {
            throw std::invalid_argument("formation_error: agent " + std::to_string(s.id) +
                                        " has no slot target");
        }
        worst = std::max(worst, horizontal_distance(s.position, it->second));
    }
    return worst;
}

}  // namespace swarmsim
