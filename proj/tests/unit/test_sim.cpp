#include <cstdlib>

#include "doctest.h"
#include "swarmsim/io.hpp"
#include "swarmsim/metrics.hpp"
#include "swarmsim/sim.hpp"

using namespace swarmsim;

namespace {

Scenario noiseless_static() {
    Scenario sc = default_scenario();
    sc.noise = NoiseModel{};
    sc.camera.latency = 0.0;
    sc.duration = 30.0;
    return sc;
}

}  // namespace

TEST_CASE("duration of one dt gives exactly one tick") {
    Scenario sc = default_scenario();
    sc.duration = 0.01;
    const auto trace = run(sc);
    REQUIRE(trace.ticks.size() == 1);
    CHECK(trace.ticks[0].t == doctest::Approx(0.01));
}

TEST_CASE("same seed twice gives byte-identical traces") {
    Scenario sc = default_scenario();
    sc.duration = 5.0;
    sc.seed = 99;
    const auto a = run(sc);
    const auto b = run(sc);
    CHECK(trace_to_csv(a) == trace_to_csv(b));

    sc.seed = 100;
    const auto c = run(sc);
    CHECK(trace_to_csv(a) != trace_to_csv(c));
}

TEST_CASE("invalid scenarios are rejected with the violated invariants") {
    Scenario sc = default_scenario();
    sc.drones[1].position = sc.drones[0].position + Vec3(0.01, 0, 0);
    CHECK_THROWS_AS(run(sc), ScenarioError);

    Scenario far = default_scenario();
    far.drones[0].position = Vec3(-10, 0, 1.0);
    CHECK_THROWS_AS(run(far), ScenarioError);
}

TEST_CASE("observations appear only on camera-frame ticks") {
    Scenario sc = default_scenario();
    sc.duration = 2.0;
    const auto trace = run(sc);
    int with_obs = 0;
    for (const auto& rec : trace.ticks) {
        if (rec.observation) ++with_obs;
    }
    // 30 Hz frames on a 100 Hz grid over 2 s: 60 frame ticks, minus dropouts
    CHECK(with_obs > 40);
    CHECK(with_obs <= 60);

    // frame ticks follow the {0.00, 0.04, 0.07} + k * 0.1 pattern of the grid
    for (const auto& rec : trace.ticks) {
        if (!rec.observation) continue;
        const double capture = rec.observation->timestamp;
        const double in_cycle = std::fmod(capture + 1e-9, 0.1);
        const bool on_schedule = in_cycle < 1e-6 || std::abs(in_cycle - 0.04) < 1e-6 ||
                                 std::abs(in_cycle - 0.07) < 1e-6;
        CHECK(on_schedule);
    }
}

TEST_CASE("no teleportation and no collisions in a default run") {
    Scenario sc = default_scenario();
    sc.duration = 20.0;
    sc.rover.speed = 1.0;
    const auto trace = run(sc);

    const double dxy = (sc.drone_params.v_max_xy + 1e-9) * sc.dt;
    const double dz = (sc.drone_params.v_max_z + 1e-9) * sc.dt;
    for (std::size_t k = 1; k < trace.ticks.size(); ++k) {
        const auto& prev = trace.ticks[k - 1];
        const auto& curr = trace.ticks[k];
        for (std::size_t i = 0; i < curr.drones.size(); ++i) {
            const Vec3 step = curr.drones[i].position - prev.drones[i].position;
            CHECK(step.head<2>().norm() <= dxy);
            CHECK(std::abs(step.z()) <= dz);
        }
    }
    CHECK(min_pairwise_distance(trace) >= 2.0 * sc.drone_params.collision_radius);
}

TEST_CASE("noiseless static landing is near exact") {
    const auto trace = run(noiseless_static());
    CHECK(trace.all_landed);
    CHECK(!trace.aborted);

    const auto final_cm = landing_rmse(trace, RmseWindow::Final);
    for (const auto& [id, err] : final_cm) CHECK(err < 1.0);

    // landed drones rest on the pad and never rearm
    bool saw_landed = false;
    for (const auto& rec : trace.ticks) {
        for (const auto& d : rec.drones) saw_landed = saw_landed || !d.motors_on;
    }
    CHECK(saw_landed);
    for (std::size_t k = 1; k < trace.ticks.size(); ++k) {
        for (std::size_t i = 0; i < trace.ticks[k].drones.size(); ++i) {
            if (!trace.ticks[k - 1].drones[i].motors_on) {
                CHECK(!trace.ticks[k].drones[i].motors_on);
            }
        }
    }
}

TEST_CASE("landed drones ride the moving pad") {
    Scenario sc = noiseless_static();
    sc.rover.speed = 1.0;
    sc.duration = 40.0;
    const auto trace = run(sc);
    REQUIRE(trace.all_landed);

    // after touchdown the drone-to-rover offset stays fixed
    const auto& last = trace.ticks.back();
    const auto& earlier = trace.ticks[trace.ticks.size() - 50];
    for (std::size_t i = 0; i < last.drones.size(); ++i) {
        REQUIRE(!last.drones[i].motors_on);
        const Vec2 off_last =
            last.drones[i].position.head<2>() - last.rover.pose.position();
        const Vec2 off_earlier =
            earlier.drones[i].position.head<2>() - earlier.rover.pose.position();
        CHECK((off_last - off_earlier).norm() < 1e-9);
    }
}

TEST_CASE("batch seeds and ordering") {
    Scenario sc = default_scenario();
    sc.duration = 3.0;
    const auto traces = run_batch(sc, 4, 10);
    REQUIRE(traces.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(traces[i].seed == 10 + i);

    // a single-run batch equals run() with the base seed
    Scenario one = sc;
    one.seed = 10;
    CHECK(trace_to_csv(run_batch(sc, 1, 10)[0]) == trace_to_csv(run(one)));
}

TEST_CASE("batch output is identical under any parallelism") {
    Scenario sc = default_scenario();
    sc.duration = 4.0;

    setenv("SWARMSIM_THREADS", "0", 1);
    const auto serial = run_batch(sc, 6, 42);
    setenv("SWARMSIM_THREADS", "8", 1);
    const auto parallel = run_batch(sc, 6, 42);
    unsetenv("SWARMSIM_THREADS");

    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(trace_to_csv(serial[i]) == trace_to_csv(parallel[i]));
    }
}

TEST_CASE("abort fires when the tag is never acquired") {
    Scenario sc = default_scenario();
    sc.noise.dropout_prob = 0.999999;  // camera effectively blind
    sc.duration = 10.0;
    const auto trace = run(sc);
    CHECK(trace.aborted);
    CHECK(!trace.all_landed);
    bool abort_event = false;
    for (const auto& ev : trace.events) abort_event = abort_event || ev.kind == "abort";
    CHECK(abort_event);
    // trace stops at the abort tick
    CHECK(trace.ticks.back().t <
          sc.mission_params.search_timeout + 3 * sc.dt);
}
