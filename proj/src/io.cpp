#include "swarmsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace swarmsim {

using nlohmann::json;

namespace {

void append_num(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    out += buf;
}

void append_row(std::string& out, double t, int agent_id, const Vec3& p, const Vec3& v,
                MissionPhase phase, bool motors_on) {
    append_num(out, t);
    out += ',';
    out += std::to_string(agent_id);
    for (double value : {p.x(), p.y(), p.z(), v.x(), v.y(), v.z()}) {
        out += ',';
        append_num(out, value);
    }
    out += ',';
    out += to_string(phase);
    out += ',';
    out += motors_on ? '1' : '0';
    out += '\n';
}

}  // namespace

std::string trace_to_csv(const SimTrace& trace) {
    std::string out = "t,agent_id,x,y,z,vx,vy,vz,phase,motors_on\n";
    for (const auto& rec : trace.ticks) {
        for (const auto& d : rec.drones) {
            append_row(out, rec.t, d.id, d.position, d.velocity, rec.phase, d.motors_on);
        }
        const auto& r = rec.rover;
        const Vec3 pos(r.pose.x, r.pose.y, r.pad_height);
        const Vec3 vel(r.linear_speed * std::cos(r.pose.theta),
                       r.linear_speed * std::sin(r.pose.theta), 0.0);
        append_row(out, rec.t, -1, pos, vel, rec.phase, true);
    }
    return out;
}

std::string summary_to_json(const std::vector<RunReport>& reports,
                            const std::vector<SpeedSummary>& summaries,
                            const std::string& scenario_hash, const std::string& window_name) {
    json j;
    j["schema_version"] = 1;
    j["scenario_hash"] = scenario_hash;
    j["window"] = window_name;

    j["runs"] = json::array();
    for (const auto& r : reports) {
        json rj;
        rj["seed"] = r.seed;
        rj["rover_speed"] = r.rover_speed;
        if (std::isfinite(r.overall_rmse_cm)) rj["overall_rmse_cm"] = r.overall_rmse_cm;
        rj["min_pairwise_m"] = r.min_pairwise_m;
        rj["aborted"] = r.aborted;
        rj["all_landed"] = r.all_landed;
        if (std::isfinite(r.time_to_land_s)) rj["time_to_land_s"] = r.time_to_land_s;
        json per = json::object();
        json fin = json::object();
        json landed = json::object();
        for (const auto& [id, final_err] : r.final_error_cm) {
            const auto label =
                r.labels.count(id) ? r.labels.at(id) : "drone " + std::to_string(id);
            if (r.rmse_cm.count(id)) per[label] = r.rmse_cm.at(id);
            fin[label] = final_err;
            landed[label] = r.landed.at(id);
        }
        rj["rmse_cm"] = per;
        rj["final_error_cm"] = fin;
        rj["landed"] = landed;
        j["runs"].push_back(rj);
    }

    j["summary_by_speed"] = json::array();
    for (const auto& s : summaries) {
        json sj;
        sj["speed"] = s.speed;
        sj["runs"] = s.runs;
        sj["landed_runs"] = s.landed_runs;
        sj["mean_overall_rmse_cm"] = s.mean_overall_rmse_cm;
        sj["per_drone_rmse_cm"] = s.per_drone_rmse_cm;
        j["summary_by_speed"].push_back(sj);
    }
    return j.dump(2) + "\n";
}

namespace {

struct PlotBounds {
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void include(double x, double y) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string trace_to_svg(const SimTrace& trace) {
    const int width = 720;
    const int height = 540;
    const double margin = 48.0;

    PlotBounds b;
    for (const auto& rec : trace.ticks) {
        b.include(rec.rover.pose.x, rec.rover.pose.y);
        for (const auto& d : rec.drones) b.include(d.position.x(), d.position.y());
    }
    if (trace.ticks.empty()) b = PlotBounds{0, 1, 0, 1};
    const double span_x = std::max(b.max_x - b.min_x, 0.5);
    const double span_y = std::max(b.max_y - b.min_y, 0.5);
    const double scale =
        std::min((width - 2 * margin) / span_x, (height - 2 * margin) / span_y);
    auto px = [&](double x) { return margin + (x - b.min_x) * scale; };
    auto py = [&](double y) { return height - margin - (y - b.min_y) * scale; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
        << "Top view (x-y, m) | rover speed " << fmt(trace.scenario.rover.speed)
        << " m/s | seed " << trace.seed << "</text>\n";

    // rover path
    svg << "<polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"2\" "
           "stroke-dasharray=\"6 4\" points=\"";
    for (const auto& rec : trace.ticks) {
        svg << fmt(px(rec.rover.pose.x)) << "," << fmt(py(rec.rover.pose.y)) << " ";
    }
    svg << "\"/>\n";

    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
    const std::size_t n_drones = trace.ticks.empty() ? 0 : trace.ticks.front().drones.size();
    for (std::size_t i = 0; i < n_drones; ++i) {
        const char* color = colors[i % 5];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& rec : trace.ticks) {
            svg << fmt(px(rec.drones[i].position.x())) << "," << fmt(py(rec.drones[i].position.y()))
                << " ";
        }
        svg << "\"/>\n";
        const auto& first = trace.ticks.front().drones[i];
        const auto& last = trace.ticks.back().drones[i];
        svg << "<circle cx=\"" << fmt(px(first.position.x())) << "\" cy=\""
            << fmt(py(first.position.y())) << "\" r=\"4\" fill=\"none\" stroke=\"" << color
            << "\"/>\n";
        svg << "<circle cx=\"" << fmt(px(last.position.x())) << "\" cy=\""
            << fmt(py(last.position.y())) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << margin + 140.0 * static_cast<double>(i) << "\" y=\""
            << height - 16 << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
            << "\">drone " << first.id << "</text>\n";
    }

    if (!trace.ticks.empty()) {
        const auto& pad = trace.ticks.back().rover.pose;
        svg << "<rect x=\"" << fmt(px(pad.x) - 6) << "\" y=\"" << fmt(py(pad.y) - 6)
            << "\" width=\"12\" height=\"12\" fill=\"none\" stroke=\"#444444\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace swarmsim
