#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "slideds/avoidance.hpp"
#include "slideds/controller.hpp"
#include "slideds/geometry.hpp"
#include "slideds/kinematics.hpp"

namespace slideds {

/// Invalid or inconsistent experiment declaration.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fixed-step plant parameters.
struct SimConfig {
    double dt{0.005};                // [s]
    double duration{20.0};           // [s]
    double contact_stiffness{5000};  // k [N/m]
    double contact_damping{50};      // c [N s/m]
    double actuator_lag{0.2};        // tau [s], first-order; 0 = ideal
    double sensor_noise_std{0.0};    // per wrench component [N], [N m]
    std::uint64_t seed{1};
};

struct RobotStart {
    double x{0.0};
    double y{0.0};
    double theta{0.0};
};

/// Declarative experiment: everything a run needs, plus optional sweep axes
/// (dotted JSON paths mapped to value lists) expanded into sub-runs.
struct Scenario {
    std::string name{"scenario"};
    RobotStart start;
    BumperGeometry bumper;
    ControllerParams controller;
    double contact_threshold{2.0};   // [N]
    double disengage_time{0.1};      // [s]
    KinematicLimits limits;
    double heading_gain{0.8};        // free-space heading alignment [1/s]
    SimConfig sim;
    AttractorDS attractor;
    ObstacleSet obstacles;
    std::map<std::string, std::vector<double>> sweep_axes;
    int sweep_reps{1};
};

namespace detail {

inline const nlohmann::json* find_path(const nlohmann::json& j, const std::string& path) {
    const nlohmann::json* cur = &j;
    size_t begin = 0;
    while (true) {
        const size_t dot = path.find('.', begin);
        const std::string key = path.substr(begin, dot - begin);
        if (!cur->is_object() || !cur->contains(key)) return nullptr;
        cur = &(*cur)[key];
        if (dot == std::string::npos) return cur;
        begin = dot + 1;
    }
}

inline double require_number(const nlohmann::json& j, const std::string& path) {
    const nlohmann::json* v = find_path(j, path);
    if (!v) throw ScenarioError("missing key: " + path);
    if (!v->is_number()) throw ScenarioError("not a number: " + path);
    return v->get<double>();
}

inline double number_or(const nlohmann::json& j, const std::string& path, double fallback) {
    const nlohmann::json* v = find_path(j, path);
    if (!v) return fallback;
    if (!v->is_number()) throw ScenarioError("not a number: " + path);
    return v->get<double>();
}

inline void set_path(nlohmann::json& j, const std::string& path, double value) {
    nlohmann::json* cur = &j;
    size_t begin = 0;
    while (true) {
        const size_t dot = path.find('.', begin);
        const std::string key = path.substr(begin, dot - begin);
        if (dot == std::string::npos) {
            (*cur)[key] = value;
            return;
        }
        cur = &(*cur)[key];
        begin = dot + 1;
    }
}

}  // namespace detail

/// Parse a scenario document. Keys carry their units; unknown keys are
/// ignored, optional keys fall back to the defaults above.
inline Scenario scenario_from_json(const nlohmann::json& j) {
    using detail::number_or;
    using detail::require_number;

    Scenario s;
    if (j.contains("name")) s.name = j["name"].get<std::string>();

    s.start.x = number_or(j, "robot_start.x_m", 0.0);
    s.start.y = number_or(j, "robot_start.y_m", 0.0);
    s.start.theta = number_or(j, "robot_start.theta_rad", 0.0);

    s.bumper.bumper_radius = number_or(j, "bumper.radius_m", 0.3);
    s.bumper.center_offset = number_or(j, "bumper.center_offset_m", 0.2);
    if (!s.bumper.valid()) throw ScenarioError("invalid bumper geometry");

    s.controller.f_n_limit = require_number(j, "controller.f_n_limit_newtons");
    s.controller.lambda_t = number_or(j, "controller.lambda_t", 0.0);
    s.controller.lambda_n = number_or(j, "controller.lambda_n", 0.5);
    s.controller.virtual_mass = number_or(j, "controller.virtual_mass_kg", 2.0);
    s.controller.ts = number_or(j, "controller.ts_seconds", 0.005);
    s.controller.max_slide_speed = number_or(j, "controller.max_slide_speed_mps", 0.5);
    s.controller.release_deadband = number_or(j, "controller.release_deadband", 0.05);
    s.contact_threshold = number_or(j, "controller.contact_threshold_newtons", 2.0);
    s.disengage_time = number_or(j, "controller.disengage_time_s", 0.1);
    if (!s.controller.valid()) throw ScenarioError("invalid controller parameters");

    s.limits.v_max = number_or(j, "kinematics.v_max_mps", 1.5);
    s.limits.omega_max = number_or(j, "kinematics.omega_max_radps", 4.124);
    s.limits.gamma_sing = number_or(j, "kinematics.gamma_sing_rad", 80.0 * M_PI / 180.0);
    s.heading_gain = number_or(j, "kinematics.heading_gain_hz", 0.8);

    s.sim.dt = require_number(j, "sim.dt_seconds");
    s.sim.duration = require_number(j, "sim.duration_seconds");
    s.sim.contact_stiffness = number_or(j, "sim.contact_stiffness_npm", 5000.0);
    s.sim.contact_damping = number_or(j, "sim.contact_damping_nspm", 50.0);
    s.sim.actuator_lag = number_or(j, "sim.actuator_lag_seconds", 0.2);
    s.sim.sensor_noise_std = number_or(j, "sim.sensor_noise_std_newtons", 0.0);
    s.sim.seed = static_cast<std::uint64_t>(number_or(j, "sim.seed", 1.0));
    if (s.sim.dt <= 0.0 || s.sim.duration <= 0.0 || s.sim.contact_stiffness <= 0.0 ||
        s.sim.contact_damping < 0.0)
        throw ScenarioError("invalid sim configuration");

    s.attractor.attractor.x() = require_number(j, "attractor.x_m");
    s.attractor.attractor.y() = require_number(j, "attractor.y_m");
    s.attractor.gain = number_or(j, "attractor.gain_hz", 1.0);
    s.attractor.v_max = number_or(j, "attractor.v_max_mps", 0.5);
    if (s.attractor.gain <= 0.0 || s.attractor.v_max <= 0.0)
        throw ScenarioError("invalid attractor");

    if (j.contains("obstacles")) {
        if (!j["obstacles"].is_array()) throw ScenarioError("obstacles: not an array");
        for (size_t i = 0; i < j["obstacles"].size(); ++i) {
            const auto& ob = j["obstacles"][i];
            const std::string base = "obstacles[" + std::to_string(i) + "]";
            Obstacle o;
            if (!ob.contains("x_m") || !ob.contains("y_m") || !ob.contains("radius_m"))
                throw ScenarioError("missing key: " + base + ".{x_m,y_m,radius_m}");
            o.center = {ob["x_m"].get<double>(), ob["y_m"].get<double>()};
            o.radius = ob["radius_m"].get<double>();
            if (o.radius <= 0.0) throw ScenarioError(base + ".radius_m must be > 0");
            o.velocity = {ob.value("vx_mps", 0.0), ob.value("vy_mps", 0.0)};
            o.planner_visible = ob.value("planner_visible", true);
            s.obstacles.push_back(o);
        }
    }

    if (j.contains("sweep")) {
        const auto& sw = j["sweep"];
        s.sweep_reps = sw.value("reps", 1);
        if (s.sweep_reps < 1) throw ScenarioError("sweep.reps must be >= 1");
        if (sw.contains("axes")) {
            for (const auto& [key, vals] : sw["axes"].items()) {
                if (!vals.is_array() || vals.empty())
                    throw ScenarioError("sweep axis empty: " + key);
                std::vector<double> axis;
                for (const auto& v : vals) axis.push_back(v.get<double>());
                s.sweep_axes[key] = axis;
            }
        }
    }
    return s;
}

inline nlohmann::json load_scenario_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError("scenario parse error in " + path + ": " + e.what());
    }
    return j;
}

inline Scenario load_scenario(const std::string& path) {
    return scenario_from_json(load_scenario_json(path));
}

}  // namespace slideds
