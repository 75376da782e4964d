#include "swarmsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace swarmsim {

using nlohmann::json;

Scenario default_scenario() {
    Scenario sc;
    sc.drones = {
        {0, Vec3(-2.5, 0.0, 1.0), 0.262},
        {1, Vec3(-2.5, 0.4, 1.0), 0.032},
        {2, Vec3(-2.5, -0.4, 1.0), 0.032},
    };
    sc.formation.offsets = {
        {0, Vec2(0.0, 0.0)},
        {1, Vec2(0.0, 0.30)},
        {2, Vec2(0.0, -0.30)},
    };
    sc.noise = NoiseModel{0.031, 0.02, 0.05};  // sigma_pos from the static calibration
    return sc;
}

std::vector<std::string> Scenario::validate() const {
    std::vector<std::string> errs;
    auto finite3 = [](const Vec3& v) { return v.allFinite(); };

    if (!(dt > 0.0)) errs.push_back("dt must be > 0");
    if (!(duration >= dt)) errs.push_back("duration must be >= dt");
    if (drones.empty()) errs.push_back("at least one drone is required");

    std::set<int> ids;
    for (const auto& d : drones) {
        if (!ids.insert(d.id).second)
            errs.push_back("duplicate drone id " + std::to_string(d.id));
        if (!finite3(d.position))
            errs.push_back("drone " + std::to_string(d.id) + " position must be finite");
    }
    for (std::size_t i = 0; i < drones.size(); ++i) {
        for (std::size_t j = i + 1; j < drones.size(); ++j) {
            if (distance(drones[i].position, drones[j].position) <
                2.0 * drone_params.collision_radius) {
                errs.push_back("drones " + std::to_string(drones[i].id) + " and " +
                               std::to_string(drones[j].id) +
                               " start closer than twice the collision radius");
            }
        }
    }

    if (!(rover.pad_height > 0.0)) errs.push_back("rover pad_height must be > 0");
    if (!(rover.body_radius > 0.0)) errs.push_back("rover body_radius must be > 0");
    if (rover.speed < 0.0) errs.push_back("rover speed must be >= 0");

    if (!(apf_params.xi > 0.0)) errs.push_back("apf xi must be > 0");
    if (!(apf_params.eta > 0.0)) errs.push_back("apf eta must be > 0");
    if (!(apf_params.d0 > 0.0)) errs.push_back("apf d0 must be > 0");
    if (!(apf_params.step_gain > 0.0)) errs.push_back("apf step_gain must be > 0");
    if (!(apf_params.v_max > 0.0)) errs.push_back("apf v_max must be > 0");

    if (!(drone_params.v_max_xy > 0.0)) errs.push_back("drone v_max_xy must be > 0");
    if (!(drone_params.v_max_z > 0.0)) errs.push_back("drone v_max_z must be > 0");
    if (!(drone_params.response_tau > 0.0)) errs.push_back("drone response_tau must be > 0");
    if (!(drone_params.collision_radius > 0.0))
        errs.push_back("drone collision_radius must be > 0");

    for (const auto& e : formation.validate(drone_params.collision_radius)) errs.push_back(e);
    for (const auto& d : drones) {
        if (!formation.offsets.count(d.id))
            errs.push_back("drone " + std::to_string(d.id) + " has no formation slot");
    }
    for (const auto& [id, off] : formation.offsets) {
        if (!ids.count(id))
            errs.push_back("formation slot " + std::to_string(id) + " has no drone");
    }

    const auto& m = mission_params;
    if (!(m.follow_altitude > 0.0)) errs.push_back("mission follow_altitude must be > 0");
    if (!(m.landing_threshold > 0.0)) errs.push_back("mission landing_threshold must be > 0");
    if (!(m.touchdown_tolerance > 0.0)) errs.push_back("mission touchdown_tolerance must be > 0");
    if (!(m.descent_rate > 0.0)) errs.push_back("mission descent_rate must be > 0");
    if (!(m.search_timeout > 0.0)) errs.push_back("mission search_timeout must be > 0");
    if (!(m.estimate_hold_timeout > 0.0))
        errs.push_back("mission estimate_hold_timeout must be > 0");
    if (m.velocity_window_frames < 2)
        errs.push_back("mission velocity_window_frames must be >= 2");
    if (m.anchor_smoothing_frames < 1)
        errs.push_back("mission anchor_smoothing_frames must be >= 1");
    if (!(m.velocity_filter_alpha > 0.0 && m.velocity_filter_alpha <= 1.0))
        errs.push_back("mission velocity_filter_alpha must be in (0, 1]");

    if (!(camera.min_range > 0.0 && camera.min_range < camera.max_range))
        errs.push_back("camera requires 0 < min_range < max_range");
    if (!(camera.rate > 0.0)) errs.push_back("camera rate must be > 0");
    if (camera.latency < 0.0) errs.push_back("camera latency must be >= 0");
    if (!(camera.fov_half_angle > 0.0)) errs.push_back("camera fov_half_angle must be > 0");

    if (noise.sigma_pos < 0.0) errs.push_back("noise sigma_pos must be >= 0");
    if (noise.sigma_yaw < 0.0) errs.push_back("noise sigma_yaw must be >= 0");
    if (!(noise.dropout_prob >= 0.0 && noise.dropout_prob < 1.0))
        errs.push_back("noise dropout_prob must be in [0, 1)");

    // Guaranteed acquisition: the leader must start inside the detection range.
    bool have_leader = false;
    int leader = 0;
    for (const auto& [id, off] : formation.offsets) {
        if (off.isZero(0.0)) {
            leader = id;
            have_leader = true;
        }
    }
    if (have_leader) {
        for (const auto& d : drones) {
            if (d.id != leader) continue;
            const Vec3 tag(rover.pose.x, rover.pose.y, rover.tag_height);
            if (distance(d.position + camera.mount_offset, tag) > camera.max_range) {
                errs.push_back("initial leader-to-pad distance exceeds the camera max_range");
            }
        }
    }
    return errs;
}

namespace {

void require_keys(const json& j, const std::string& path,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ScenarioError("unknown key \"" + path + key + "\" in scenario");
        }
    }
}

double get_num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ScenarioError(std::string("key \"") + key + "\" must be a number");
    return j.at(key).get<double>();
}

Vec3 get_vec3(const json& j, const char* key, const Vec3& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 3)
        throw ScenarioError(std::string("key \"") + key + "\" must be an array of 3 numbers");
    return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario syntax error: ") + e.what());
    }
    if (!j.is_object()) throw ScenarioError("scenario root must be a JSON object");

    require_keys(j, "", {"schema_version", "seed", "dt", "duration", "drones", "rover", "apf",
                         "drone_params", "formation", "mission_params", "camera", "noise",
                         "sweep"});
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
        throw ScenarioError("unsupported schema_version (expected 1)");

    Scenario sc = default_scenario();
    if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
    sc.dt = get_num(j, "dt", sc.dt);
    sc.duration = get_num(j, "duration", sc.duration);

    if (j.contains("drones")) {
        const auto& arr = j.at("drones");
        if (!arr.is_array() || arr.empty())
            throw ScenarioError("\"drones\" must be a non-empty array");
        sc.drones.clear();
        for (const auto& dj : arr) {
            require_keys(dj, "drones[].", {"id", "position", "mass"});
            DroneSpec d;
            d.id = dj.at("id").get<int>();
            d.position = get_vec3(dj, "position", Vec3::Zero());
            d.mass = get_num(dj, "mass", d.mass);
            sc.drones.push_back(d);
        }
    }

    if (j.contains("rover")) {
        const auto& rj = j.at("rover");
        require_keys(rj, "rover.", {"pose", "pad_height", "body_radius", "tag_height", "speed",
                                    "drive_duration"});
        if (rj.contains("pose")) {
            const auto& p = rj.at("pose");
            if (!p.is_array() || p.size() != 3)
                throw ScenarioError("rover.pose must be [x, y, theta]");
            sc.rover.pose = Pose2D{p[0].get<double>(), p[1].get<double>(),
                                   normalize_angle(p[2].get<double>())};
        }
        sc.rover.pad_height = get_num(rj, "pad_height", sc.rover.pad_height);
        sc.rover.body_radius = get_num(rj, "body_radius", sc.rover.body_radius);
        sc.rover.tag_height = get_num(rj, "tag_height", sc.rover.pad_height);
        sc.rover.speed = get_num(rj, "speed", sc.rover.speed);
        sc.rover.drive_duration = get_num(rj, "drive_duration", sc.rover.drive_duration);
    }

    if (j.contains("apf")) {
        const auto& a = j.at("apf");
        require_keys(a, "apf.", {"xi", "eta", "d0", "step_gain", "v_max", "rho_min"});
        sc.apf_params.xi = get_num(a, "xi", sc.apf_params.xi);
        sc.apf_params.eta = get_num(a, "eta", sc.apf_params.eta);
        sc.apf_params.d0 = get_num(a, "d0", sc.apf_params.d0);
        sc.apf_params.step_gain = get_num(a, "step_gain", sc.apf_params.step_gain);
        sc.apf_params.v_max = get_num(a, "v_max", sc.apf_params.v_max);
        sc.apf_params.rho_min = get_num(a, "rho_min", sc.apf_params.rho_min);
    }

    if (j.contains("drone_params")) {
        const auto& d = j.at("drone_params");
        require_keys(d, "drone_params.",
                     {"v_max_xy", "v_max_z", "response_tau", "collision_radius"});
        sc.drone_params.v_max_xy = get_num(d, "v_max_xy", sc.drone_params.v_max_xy);
        sc.drone_params.v_max_z = get_num(d, "v_max_z", sc.drone_params.v_max_z);
        sc.drone_params.response_tau = get_num(d, "response_tau", sc.drone_params.response_tau);
        sc.drone_params.collision_radius =
            get_num(d, "collision_radius", sc.drone_params.collision_radius);
    }

    if (j.contains("formation")) {
        const auto& f = j.at("formation");
        require_keys(f, "formation.", {"offsets"});
        if (f.contains("offsets")) {
            sc.formation.offsets.clear();
            for (const auto& [key, value] : f.at("offsets").items()) {
                if (!value.is_array() || value.size() != 2)
                    throw ScenarioError("formation.offsets values must be [x, y]");
                sc.formation.offsets[std::stoi(key)] =
                    Vec2(value[0].get<double>(), value[1].get<double>());
            }
        }
    }

    if (j.contains("mission_params")) {
        const auto& m = j.at("mission_params");
        require_keys(m, "mission_params.",
                     {"follow_altitude", "landing_threshold", "touchdown_tolerance",
                      "descent_rate", "search_timeout", "estimate_hold_timeout",
                      "velocity_window_frames", "anchor_smoothing_frames",
                      "velocity_filter_alpha"});
        auto& mp = sc.mission_params;
        mp.follow_altitude = get_num(m, "follow_altitude", mp.follow_altitude);
        mp.landing_threshold = get_num(m, "landing_threshold", mp.landing_threshold);
        mp.touchdown_tolerance = get_num(m, "touchdown_tolerance", mp.touchdown_tolerance);
        mp.descent_rate = get_num(m, "descent_rate", mp.descent_rate);
        mp.search_timeout = get_num(m, "search_timeout", mp.search_timeout);
        mp.estimate_hold_timeout = get_num(m, "estimate_hold_timeout", mp.estimate_hold_timeout);
        mp.velocity_window_frames = static_cast<int>(
            get_num(m, "velocity_window_frames", mp.velocity_window_frames));
        mp.anchor_smoothing_frames = static_cast<int>(
            get_num(m, "anchor_smoothing_frames", mp.anchor_smoothing_frames));
        mp.velocity_filter_alpha = get_num(m, "velocity_filter_alpha", mp.velocity_filter_alpha);
    }

    if (j.contains("camera")) {
        const auto& c = j.at("camera");
        require_keys(c, "camera.", {"mount_offset", "fov_half_angle", "min_range", "max_range",
                                    "rate", "latency"});
        sc.camera.mount_offset = get_vec3(c, "mount_offset", sc.camera.mount_offset);
        sc.camera.fov_half_angle = get_num(c, "fov_half_angle", sc.camera.fov_half_angle);
        sc.camera.min_range = get_num(c, "min_range", sc.camera.min_range);
        sc.camera.max_range = get_num(c, "max_range", sc.camera.max_range);
        sc.camera.rate = get_num(c, "rate", sc.camera.rate);
        sc.camera.latency = get_num(c, "latency", sc.camera.latency);
    }

    if (j.contains("noise")) {
        const auto& nj = j.at("noise");
        require_keys(nj, "noise.", {"sigma_pos", "sigma_yaw", "dropout_prob"});
        sc.noise.sigma_pos = get_num(nj, "sigma_pos", sc.noise.sigma_pos);
        sc.noise.sigma_yaw = get_num(nj, "sigma_yaw", sc.noise.sigma_yaw);
        sc.noise.dropout_prob = get_num(nj, "dropout_prob", sc.noise.dropout_prob);
    }

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        require_keys(s, "sweep.", {"speeds"});
        if (!s.contains("speeds") || !s.at("speeds").is_array())
            throw ScenarioError("sweep.speeds must be an array of numbers");
    }

    const auto violations = sc.validate();
    if (!violations.empty()) {
        std::string msg = "scenario invariant violations:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw ScenarioError(msg, violations);
    }
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string serialize_scenario(const Scenario& sc) {
    json j;
    j["schema_version"] = 1;
    j["seed"] = sc.seed;
    j["dt"] = sc.dt;
    j["duration"] = sc.duration;
    j["drones"] = json::array();
    for (const auto& d : sc.drones) {
        j["drones"].push_back(
            {{"id", d.id}, {"position", vec3_json(d.position)}, {"mass", d.mass}});
    }
    j["rover"] = {{"pose", json::array({sc.rover.pose.x, sc.rover.pose.y, sc.rover.pose.theta})},
                  {"pad_height", sc.rover.pad_height},
                  {"body_radius", sc.rover.body_radius},
                  {"tag_height", sc.rover.tag_height},
                  {"speed", sc.rover.speed},
                  {"drive_duration", sc.rover.drive_duration}};
    j["apf"] = {{"xi", sc.apf_params.xi},     {"eta", sc.apf_params.eta},
                {"d0", sc.apf_params.d0},     {"step_gain", sc.apf_params.step_gain},
                {"v_max", sc.apf_params.v_max}, {"rho_min", sc.apf_params.rho_min}};
    j["drone_params"] = {{"v_max_xy", sc.drone_params.v_max_xy},
                         {"v_max_z", sc.drone_params.v_max_z},
                         {"response_tau", sc.drone_params.response_tau},
                         {"collision_radius", sc.drone_params.collision_radius}};
    json offs = json::object();
    for (const auto& [id, off] : sc.formation.offsets) {
        offs[std::to_string(id)] = json::array({off.x(), off.y()});
    }
    j["formation"] = {{"offsets", offs}};
    j["mission_params"] = {{"follow_altitude", sc.mission_params.follow_altitude},
                           {"landing_threshold", sc.mission_params.landing_threshold},
                           {"touchdown_tolerance", sc.mission_params.touchdown_tolerance},
                           {"descent_rate", sc.mission_params.descent_rate},
                           {"search_timeout", sc.mission_params.search_timeout},
                           {"estimate_hold_timeout", sc.mission_params.estimate_hold_timeout},
                           {"velocity_window_frames", sc.mission_params.velocity_window_frames},
                           {"anchor_smoothing_frames", sc.mission_params.anchor_smoothing_frames},
                           {"velocity_filter_alpha", sc.mission_params.velocity_filter_alpha}};
    j["camera"] = {{"mount_offset", vec3_json(sc.camera.mount_offset)},
                   {"fov_half_angle", sc.camera.fov_half_angle},
                   {"min_range", sc.camera.min_range},
                   {"max_range", sc.camera.max_range},
                   {"rate", sc.camera.rate},
                   {"latency", sc.camera.latency}};
    j["noise"] = {{"sigma_pos", sc.noise.sigma_pos},
                  {"sigma_yaw", sc.noise.sigma_yaw},
                  {"dropout_prob", sc.noise.dropout_prob}};
    return j.dump(2);
}

std::vector<double> sweep_speeds(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario syntax error: ") + e.what());
    }
    std::vector<double> speeds;
    if (j.is_object() && j.contains("sweep")) {
        for (const auto& s : j.at("sweep").at("speeds")) speeds.push_back(s.get<double>());
    }
    return speeds;
}

std::vector<Scenario> expand_sweep(const std::string& text) {
    const Scenario base = parse_scenario_text(text);
    const auto speeds = sweep_speeds(text);
    if (speeds.empty()) return {base};
    std::vector<Scenario> out;
    for (double speed : speeds) {
        Scenario sc = base;
        sc.rover.speed = speed;
        const auto violations = sc.validate();
        if (!violations.empty()) {
            throw ScenarioError("sweep speed " + std::to_string(speed) +
                                " produces an invalid scenario: " + violations.front());
        }
        out.push_back(sc);
    }
    return out;
}

std::uint64_t scenario_hash(const Scenario& sc) {
    // FNV-1a over the canonical serialization.
    const std::string s = serialize_scenario(sc);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace swarmsim
