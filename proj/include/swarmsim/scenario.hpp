// Scenario: the full, validated description of one simulation run. Parsed
// from JSON (schema_version 1); every field has a documented default so a
// minimal file needs only the values under study.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmsim/apf.hpp"
#include "swarmsim/formation.hpp"
#include "swarmsim/mission.hpp"
#include "swarmsim/types.hpp"
#include "swarmsim/vehicles.hpp"
#include "swarmsim/vision.hpp"

namespace swarmsim {

struct DroneSpec {
    int id = 0;
    Vec3 position = Vec3::Zero();
    double mass = 0.032;  // kg, bookkeeping only

    bool operator==(const DroneSpec&) const = default;
};

struct RoverSpec {
    Pose2D pose;                // initial pose; theta is the drive heading
    double pad_height = 0.70;   // m
    double body_radius = 0.30;  // m, bookkeeping only
    double tag_height = 0.70;   // m, world z of the tag center (defaults to pad_height)
    double speed = 0.0;         // m/s straight-line mission speed
    double drive_duration = -1.0;  // s; negative means "whole scenario"

    bool operator==(const RoverSpec&) const = default;
};

struct Scenario {
    std::uint64_t seed = 1;
    double dt = 0.01;        // s
    double duration = 40.0;  // s
    std::vector<DroneSpec> drones;
    RoverSpec rover;
    apf::APFParams apf_params;
    DroneParams drone_params;
    FormationSpec formation;
    MissionParams mission_params;
    CameraModel camera;
    NoiseModel noise;

    RoverMission rover_mission() const {
        const double d = rover.drive_duration < 0.0 ? duration : rover.drive_duration;
        return straight_line_mission(rover.speed, rover.pose.theta, d);
    }

    // All violated invariants, empty when the scenario is valid.
    std::vector<std::string> validate() const;
};

// Three-drone desk-scale setup mirroring the experiments: leader plus two
// flanking followers starting 2.5 m from the pad.
Scenario default_scenario();

struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& what, std::vector<std::string> details = {})
        : std::runtime_error(what), violations(std::move(details)) {}
    std::vector<std::string> violations;
};

// JSON round trip. parse_scenario rejects unknown keys (with their path) and
// reports all violated invariants; serialize_scenario emits every field.
Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& sc);

// A scenario file may carry a top-level `sweep: {speeds: [...]}` block; this
// expands it into one scenario per rover speed (the base scenario when absent).
std::vector<Scenario> expand_sweep(const std::string& text);
std::vector<double> sweep_speeds(const std::string& text);

std::uint64_t scenario_hash(const Scenario& sc);

}  // namespace swarmsim
