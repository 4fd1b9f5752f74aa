#pragma once

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "slideds/simulator.hpp"

namespace slideds {

struct TraceIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// 17 significant digits: text -> double recovers the exact bit pattern.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace detail

inline constexpr const char* kTraceColumns =
    "t,x,y,theta,v_cmd,omega_cmd,fx,fy,mz,gamma_est,f_mag_est,in_contact,"
    "xi_u_x,xi_u_y,xi_d_x,xi_d_y";

/// One row per step in the documented column order, preceded by a small
/// commented preamble carrying the run context metrics need.
inline void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw TraceIoError("cannot write trace: " + path);
    using detail::fmt;

    out << "# slideds-trace v1\n";
    out << "# dt=" << fmt(trace.dt) << "\n";
    out << "# f_n=" << fmt(trace.f_n) << "\n";
    out << "# attractor=" << fmt(trace.attractor.x()) << " "
        << fmt(trace.attractor.y()) << "\n";
    for (const auto& ob : trace.obstacles)
        out << "# obstacle=" << fmt(ob.radius) << " " << (ob.planner_visible ? 1 : 0)
            << "\n";

    out << kTraceColumns;
    for (size_t k = 0; k < trace.obstacles.size(); ++k)
        out << ",obs" << k << "_x,obs" << k << "_y";
    out << "\n";

    for (const auto& r : trace.records) {
        out << fmt(r.t) << ',' << fmt(r.robot.x) << ',' << fmt(r.robot.y) << ','
            << fmt(r.robot.theta) << ',' << fmt(r.command.v) << ','
            << fmt(r.command.omega) << ',' << fmt(r.wrench.fx) << ','
            << fmt(r.wrench.fy) << ',' << fmt(r.wrench.mz) << ','
            << fmt(r.estimate.gamma) << ',' << fmt(r.estimate.f_mag) << ','
            << (r.estimate.in_contact ? 1 : 0) << ',' << fmt(r.nominal_velocity.x())
            << ',' << fmt(r.nominal_velocity.y()) << ',' << fmt(r.desired_velocity.x())
            << ',' << fmt(r.desired_velocity.y());
        for (const auto& p : r.obstacle_positions)
            out << ',' << fmt(p.x()) << ',' << fmt(p.y());
        out << '\n';
    }
}

/// Inverse of write_trace_csv. Velocity state of the base is not part of the
/// file format; everything metrics consume round-trips exactly.
inline Trace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TraceIoError("cannot read trace: " + path);

    Trace trace;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.substr(1);
            const size_t eq = body.find('=');
            if (eq == std::string::npos) continue;
            std::string key = body.substr(0, eq);
            key.erase(0, key.find_first_not_of(' '));
            const std::string val = body.substr(eq + 1);
            if (key == "dt") trace.dt = std::strtod(val.c_str(), nullptr);
            else if (key == "f_n") trace.f_n = std::strtod(val.c_str(), nullptr);
            else if (key == "attractor") {
                char* end = nullptr;
                trace.attractor.x() = std::strtod(val.c_str(), &end);
                trace.attractor.y() = std::strtod(end, nullptr);
            } else if (key == "obstacle") {
                char* end = nullptr;
                Trace::ObstacleMeta meta;
                meta.radius = std::strtod(val.c_str(), &end);
                meta.planner_visible = std::strtol(end, nullptr, 10) != 0;
                trace.obstacles.push_back(meta);
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind(kTraceColumns, 0) != 0)
                throw TraceIoError("unexpected trace header in " + path);
            header_seen = true;
            continue;
        }
        const auto cells = detail::split(line, ',');
        const size_t expected = 16 + 2 * trace.obstacles.size();
        if (cells.size() != expected)
            throw TraceIoError("bad column count in " + path);

        TraceRecord r;
        auto num = [&](size_t i) { return std::strtod(cells[i].c_str(), nullptr); };
        r.t = num(0);
        r.robot.x = num(1);
        r.robot.y = num(2);
        r.robot.theta = num(3);
        r.command.v = num(4);
        r.command.omega = num(5);
        r.wrench.fx = num(6);
        r.wrench.fy = num(7);
        r.wrench.mz = num(8);
        r.estimate.gamma = num(9);
        r.estimate.f_mag = num(10);
        r.estimate.in_contact = cells[11] == "1";
        r.nominal_velocity = {num(12), num(13)};
        r.desired_velocity = {num(14), num(15)};
        for (size_t k = 0; k < trace.obstacles.size(); ++k)
            r.obstacle_positions.push_back({num(16 + 2 * k), num(17 + 2 * k)});
        trace.records.push_back(std::move(r));
    }
    if (!header_seen) throw TraceIoError("no trace header in " + path);
    return trace;
}

/// Metrics as JSON; non-finite values (no stable window, no visible
/// obstacles) become null.
inline nlohmann::json metrics_to_json(const Metrics& m) {
    nlohmann::json j;
    j["peak_force_newtons"] = m.peak_force;
    j["mean_slide_force_newtons"] = m.mean_slide_force;
    j["std_slide_force_newtons"] = m.std_slide_force;
    j["transient_time_seconds"] = m.transient_time;
    j["min_gamma_margin"] = m.min_gamma_margin;
    j["attractor_error_m"] = m.attractor_error;
    return j;
}

/// Metrics document for a trace; marks contact-free traces instead of
/// failing so no-contact regressions still produce output.
inline nlohmann::json trace_metrics_json(const Trace& trace) {
    nlohmann::json j;
    try {
        j = metrics_to_json(compute_metrics(trace, trace.f_n));
        j["contact"] = true;
    } catch (const NoContact&) {
        Metrics m;
        if (!trace.records.empty()) {
            const auto& last = trace.records.back().robot;
            m.attractor_error =
                (Eigen::Vector2d(last.x, last.y) - trace.attractor).norm();
        }
        j["contact"] = false;
        j["attractor_error_m"] = m.attractor_error;
    }
    return j;
}

/// Force-vs-time and trajectory points for external plotting.
inline void write_plot_data(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw TraceIoError("cannot write plot data: " + path);
    using detail::fmt;
    out << "t,force_mag,x,y\n";
    for (const auto& r : trace.records)
        out << fmt(r.t) << ',' << fmt(std::hypot(r.wrench.fx, r.wrench.fy)) << ','
            << fmt(r.robot.x) << ',' << fmt(r.robot.y) << '\n';
}

}  // namespace slideds
