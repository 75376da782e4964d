#include <cmath>

#include "doctest.h"
#include "swarmsim/metrics.hpp"

using namespace swarmsim;

namespace {

// Hand-built single-drone trace with prescribed horizontal slot errors.
SimTrace synthetic_trace(const std::vector<double>& errors_m, MissionPhase phase) {
    SimTrace trace;
    trace.scenario = default_scenario();
    trace.scenario.drones = {{0, Vec3(-2.5, 0, 1.0), 0.262}};
    trace.scenario.formation.offsets = {{0, Vec2(0, 0)}};
    double t = 0.0;
    for (double err : errors_m) {
        TickRecord rec;
        rec.t = (t += 0.01);
        rec.rover = RoverState{};
        rec.phase = phase;
        rec.drones = {AgentState{0, Vec3(err, 0.0, 1.0)}};
        trace.ticks.push_back(rec);
    }
    return trace;
}

}  // namespace

TEST_CASE("landing rmse on prescribed errors") {
    CHECK(landing_rmse(synthetic_trace({0, 0, 0}, MissionPhase::Descend),
                       RmseWindow::DescendTouchdown)
              .at(0) == 0.0);

    // constant offset: RMSE equals the offset
    const auto constant = synthetic_trace(std::vector<double>(100, 0.0448),
                                          MissionPhase::Descend);
    CHECK(landing_rmse(constant, RmseWindow::DescendTouchdown).at(0) ==
          doctest::Approx(4.48).epsilon(1e-12));

    // two ticks at 3 and 4 cm -> sqrt(12.5) cm
    const auto two = synthetic_trace({0.03, 0.04}, MissionPhase::Descend);
    CHECK(landing_rmse(two, RmseWindow::DescendTouchdown).at(0) ==
          doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
}

TEST_CASE("landing rmse needs ticks in the window") {
    const auto follow_only = synthetic_trace({0.05, 0.05}, MissionPhase::Follow);
    CHECK_THROWS_AS(landing_rmse(follow_only, RmseWindow::DescendTouchdown),
                    std::invalid_argument);
}

TEST_CASE("overall rmse is the rms of the per-drone values") {
    Scenario sc = default_scenario();
    sc.noise = NoiseModel{0.05, 0.02, 0.05};
    sc.duration = 30.0;
    const auto trace = run(sc);
    const auto per = landing_rmse(trace, RmseWindow::DescendTouchdown);
    double ms = 0.0;
    for (const auto& [id, r] : per) ms += r * r;
    CHECK(overall_rmse(trace, RmseWindow::DescendTouchdown) ==
          doctest::Approx(std::sqrt(ms / per.size())).epsilon(1e-12));
}

TEST_CASE("landing rmse is invariant under a rigid world transform") {
    Scenario sc = default_scenario();
    sc.duration = 25.0;
    auto trace = run(sc);
    const auto base = overall_rmse(trace, RmseWindow::DescendTouchdown);

    const double theta = 0.83;
    const Eigen::Rotation2Dd rot(theta);
    const Vec2 shift(3.0, -2.0);
    for (auto& rec : trace.ticks) {
        for (auto& d : rec.drones) {
            const Vec2 xy = rot * d.position.head<2>() + shift;
            d.position.head<2>() = xy;
        }
        const Vec2 rxy = rot * rec.rover.pose.position() + shift;
        rec.rover.pose = Pose2D{rxy.x(), rxy.y(),
                                normalize_angle(rec.rover.pose.theta + theta)};
    }
    CHECK(overall_rmse(trace, RmseWindow::DescendTouchdown) ==
          doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("report classification and summary grouping") {
    Scenario sc = default_scenario();
    sc.duration = 30.0;
    const auto trace = run(sc);
    const auto report = make_report(trace);
    CHECK(report.labels.at(0) == "leader");
    CHECK(report.labels.at(1) == "2L");
    CHECK(report.labels.at(2) == "3R");
    for (const auto& [id, ok] : report.landed) {
        if (ok) CHECK(report.final_error_cm.at(id) <= 15.0);
    }

    const auto summaries = summarize_batch({report});
    REQUIRE(summaries.size() == 1);
    CHECK(summaries[0].mean_overall_rmse_cm == doctest::Approx(report.overall_rmse_cm));

    const auto three = summarize_batch({report, report, report});
    CHECK(three[0].mean_overall_rmse_cm == doctest::Approx(report.overall_rmse_cm));
    CHECK(three[0].runs == 3);

    const auto table = format_summary_table(summaries);
    CHECK(table.find("leader RMSE, cm") != std::string::npos);
    CHECK(table.find("Mobile robot velocity") != std::string::npos);

    CHECK_THROWS_AS(summarize_batch({}), std::invalid_argument);
}

TEST_CASE("aborted runs report without a landing window") {
    Scenario sc = default_scenario();
    sc.noise.dropout_prob = 0.999999;
    sc.duration = 8.0;
    const auto trace = run(sc);
    REQUIRE(trace.aborted);
    const auto report = make_report(trace);
    CHECK(!std::isfinite(report.overall_rmse_cm));
    CHECK(report.rmse_cm.empty());
    CHECK(!report.final_error_cm.empty());
    for (const auto& [id, ok] : report.landed) CHECK(!ok);

    const auto summaries = summarize_batch({report});
    CHECK(summaries[0].landed_runs == 0);
    CHECK(!std::isfinite(summaries[0].mean_overall_rmse_cm));
}

TEST_CASE("touchdown gate bounds the slot error against the estimate") {
    Scenario sc = default_scenario();
    sc.rover.speed = 1.0;
    sc.duration = 40.0;
    const auto trace = run(sc);
    REQUIRE(trace.all_landed);
    int touchdowns = 0;
    for (const auto& ev : trace.events) {
        if (ev.kind != "touchdown") continue;
        ++touchdowns;
        CHECK(ev.est_error <= sc.mission_params.landing_threshold + 1e-12);
    }
    CHECK(touchdowns == 3);
}

TEST_CASE("calibration hits a zero target with zero sigma") {
    Scenario sc = default_scenario();
    sc.noise = NoiseModel{};
    sc.camera.latency = 0.0;
    sc.duration = 30.0;
    const auto result = calibrate_noise(0.0, sc, 2, 1);
    CHECK(result.sigma_pos == 0.0);
}

TEST_CASE("batch rmse grows with sigma") {
    Scenario sc = default_scenario();
    sc.duration = 30.0;

    auto mean_rmse = [&](double sigma) {
        Scenario s = sc;
        s.noise.sigma_pos = sigma;
        const auto traces = run_batch(s, 3, 5);
        double sum = 0.0;
        for (const auto& t : traces) sum += overall_rmse(t, RmseWindow::DescendTouchdown);
        return sum / traces.size();
    };
    CHECK(mean_rmse(0.0) < mean_rmse(0.08));
    CHECK(mean_rmse(0.02) < mean_rmse(0.15));
}
