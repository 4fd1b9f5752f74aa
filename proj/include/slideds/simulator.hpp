#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>
#include <Eigen/Core>
#include <Eigen/Geometry>

#include "slideds/avoidance.hpp"
#include "slideds/contact_estimation.hpp"
#include "slideds/controller.hpp"
#include "slideds/geometry.hpp"
#include "slideds/kinematics.hpp"
#include "slideds/scenario.hpp"

namespace slideds {

/// Unicycle pose plus the velocities currently realized by the base.
struct RobotState {
    double x{0.0};
    double y{0.0};
    double theta{0.0};   // wrapped to (-pi, pi]
    double v{0.0};
    double omega{0.0};
};

struct TraceRecord {
    double t{0.0};
    RobotState robot;
    RobotCommand command;                     // pre-lag command of this step
    Wrench wrench;
    ContactEstimate estimate;
    Eigen::Vector2d nominal_velocity{0, 0};   // world-frame modulated DS
    Eigen::Vector2d desired_velocity{0, 0};   // body-frame controller output
    std::vector<Eigen::Vector2d> obstacle_positions;
};

/// Uniformly sampled run record plus the context metrics need.
struct Trace {
    double dt{0.0};
    double f_n{0.0};
    Eigen::Vector2d attractor{0.0, 0.0};
    struct ObstacleMeta {
        double radius{0.0};
        bool planner_visible{true};
    };
    std::vector<ObstacleMeta> obstacles;
    std::vector<TraceRecord> records;
};

struct Metrics {
    double peak_force{0.0};
    double mean_slide_force{std::numeric_limits<double>::quiet_NaN()};
    double std_slide_force{std::numeric_limits<double>::quiet_NaN()};
    double transient_time{std::numeric_limits<double>::quiet_NaN()};
    double min_gamma_margin{std::numeric_limits<double>::infinity()};
    double attractor_error{0.0};
};

/// Trace without a single contact sample.
struct NoContact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Spring-damper penetration law, tensionless: the damper resists approach,
/// brakes the rebound, and the total never pulls.
inline double penetration_force(double penetration, double penetration_rate,
                                double stiffness, double damping) {
    if (penetration <= 0.0) return 0.0;
    return std::max(0.0, stiffness * penetration + damping * penetration_rate);
}

struct ContactResult {
    Wrench wrench;
    bool contact{false};
    double gamma{0.0};         // ground-truth bearing in the bumper frame
    int obstacle_index{-1};
    double penetration{0.0};
};

/// Deepest-penetrating obstacle against the frontal bumper arc; the sensed
/// wrench encodes the ground-truth bearing through the sensor forward model.
inline ContactResult contact_wrench(const RobotState& robot,
                                    const BumperGeometry& geom,
                                    const ObstacleSet& obstacles,
                                    double stiffness, double damping) {
    const double ct = std::cos(robot.theta);
    const double st = std::sin(robot.theta);
    const Eigen::Vector2d bumper_center(robot.x + geom.center_offset * ct,
                                        robot.y + geom.center_offset * st);

    ContactResult best;
    double best_distance = 0.0;
    for (size_t i = 0; i < obstacles.size(); ++i) {
        const Eigen::Vector2d rel = obstacles[i].center - bumper_center;
        const double dist = rel.norm();
        const double pen = (geom.bumper_radius + obstacles[i].radius) - dist;
        if (pen <= 0.0) continue;
        const double bearing = wrap_angle(std::atan2(rel.y(), rel.x()) - robot.theta);
        if (std::abs(bearing) > M_PI / 2.0) continue;   // behind the sensing arc
        if (!best.contact || pen > best.penetration) {
            best.contact = true;
            best.penetration = pen;
            best.gamma = bearing;
            best.obstacle_index = static_cast<int>(i);
            best_distance = dist;
        }
    }
    if (!best.contact) return best;

    const Obstacle& ob = obstacles[static_cast<size_t>(best.obstacle_index)];
    const Eigen::Vector2d bumper_vel(
        robot.v * ct - geom.center_offset * robot.omega * st,
        robot.v * st + geom.center_offset * robot.omega * ct);
    const Eigen::Vector2d rel = ob.center - bumper_center;
    const Eigen::Vector2d rel_vel = ob.velocity - bumper_vel;
    const double pen_rate = -rel.dot(rel_vel) / std::max(best_distance, 1e-12);

    const double f = penetration_force(best.penetration, pen_rate, stiffness, damping);
    // Sensor-frame convention of the forward model: a contact at bearing
    // gamma is read as a force along (sin gamma, cos gamma).
    const double fx = f * std::sin(best.gamma);
    const double fy = f * std::cos(best.gamma);
    best.wrench = forward_wrench(best.gamma, fx, fy, geom.bumper_radius);
    return best;
}

namespace detail {

/// Track a world-frame velocity with a differential-drive base: project on
/// the heading, steer down the angle error, drive in reverse when the target
/// points backward.
inline RobotCommand track_velocity(const Eigen::Vector2d& v_world, double theta,
                                   double heading_gain) {
    const double speed = v_world.norm();
    if (speed < 1e-3) return RobotCommand{};
    const double err = wrap_angle(std::atan2(v_world.y(), v_world.x()) - theta);
    if (std::abs(err) <= M_PI / 2.0)
        return RobotCommand{speed * std::cos(err), heading_gain * err};
    const double rev = wrap_angle(err - M_PI);
    return RobotCommand{-speed * std::cos(rev), heading_gain * rev};
}

inline Eigen::Vector2d to_body(const Eigen::Vector2d& v_world, double theta) {
    return Eigen::Rotation2Dd(-theta) * v_world;
}

}  // namespace detail

/// Run the closed loop at fixed step: sense, compensate, estimate, control
/// (compliance when engaged, avoidance pass-through otherwise), actuate
/// through a first-order lag, integrate the unicycle, advance obstacles.
inline Trace simulate(const Scenario& scenario,
                      const CompensationModel& compensation = identity_compensation()) {
    if (scenario.sim.dt <= 0.0 || scenario.sim.duration <= 0.0)
        throw ScenarioError("invalid sim configuration");
    for (const auto& ob : scenario.obstacles) {
        if (ob.radius <= 0.0) throw ScenarioError("obstacle radius must be > 0");
        // The planner must start outside every visible obstacle; adversarial
        // obstacles may already be in contact at t = 0.
        if (ob.planner_visible &&
            gamma_of(ob, {scenario.start.x, scenario.start.y}) < 1.0)
            throw ScenarioError("robot starts inside a visible obstacle");
    }

    const double dt = scenario.sim.dt;
    const int n_steps = static_cast<int>(std::llround(scenario.sim.duration / dt));

    RobotState robot;
    robot.x = scenario.start.x;
    robot.y = scenario.start.y;
    robot.theta = wrap_angle(scenario.start.theta);

    ObstacleSet obstacles = scenario.obstacles;
    ComplianceController controller(scenario.controller, scenario.disengage_time);
    int last_contact_index = -1;

    std::mt19937_64 rng(scenario.sim.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double noise_std = scenario.sim.sensor_noise_std;

    Trace trace;
    trace.dt = dt;
    trace.f_n = scenario.controller.f_n_limit;
    trace.attractor = scenario.attractor.attractor;
    for (const auto& ob : obstacles)
        trace.obstacles.push_back({ob.radius, ob.planner_visible});
    trace.records.reserve(static_cast<size_t>(n_steps));

    for (int step_idx = 0; step_idx < n_steps; ++step_idx) {
        const double t = step_idx * dt;

        ContactResult sensed = contact_wrench(robot, scenario.bumper, obstacles,
                                              scenario.sim.contact_stiffness,
                                              scenario.sim.contact_damping);
        Wrench measured = sensed.wrench;
        if (noise_std > 0.0) {
            measured.fx += noise_std * noise(rng);
            measured.fy += noise_std * noise(rng);
            measured.mz += noise_std * noise(rng);
        }
        measured = compensate(measured, compensation);

        ContactEstimate est;
        try {
            est = estimate_contact(measured, scenario.bumper.bumper_radius,
                                   scenario.contact_threshold);
        } catch (const DegenerateWrench&) {
            est = ContactEstimate{};   // drop the glitched sample
        }
        if (est.in_contact && sensed.obstacle_index >= 0)
            last_contact_index = sensed.obstacle_index;

        const Eigen::Vector2d pos(robot.x, robot.y);
        const Eigen::Vector2d nominal =
            modulate(linear_ds(pos, scenario.attractor), pos, obstacles);

        RobotCommand cmd;
        Eigen::Vector2d desired(0.0, 0.0);
        const bool engaged = controller.observe(est, dt);
        if (engaged) {
            Eigen::Vector2d obstacle_vel(0.0, 0.0);
            if (last_contact_index >= 0)
                obstacle_vel = obstacles[static_cast<size_t>(last_contact_index)].velocity;
            const Eigen::Vector2d obstacle_vel_body =
                detail::to_body(obstacle_vel, robot.theta);
            const Eigen::Vector2d nominal_rel =
                detail::to_body(nominal, robot.theta) - obstacle_vel_body;

            const Eigen::Vector2d desired_rel = controller.command(est, nominal_rel);
            desired = desired_rel + obstacle_vel_body;

            const double gamma = est.in_contact ? est.gamma : controller.last_gamma();
            if (std::abs(std::cos(gamma)) >= std::cos(scenario.limits.gamma_sing)) {
                cmd = to_robot_command(desired, gamma, scenario.bumper.bumper_radius,
                                       scenario.limits.gamma_sing);
            } else {
                // Near-lateral contact: the base cannot realize the normal
                // component; keep the tangential part at the singular limit.
                const ContactFrame frame = contact_frame(gamma);
                const Eigen::Vector2d tangential =
                    frame.t_hat.dot(desired) * frame.t_hat;
                const double clamped =
                    std::copysign(scenario.limits.gamma_sing, gamma);
                cmd = to_robot_command(tangential, clamped,
                                       scenario.bumper.bumper_radius,
                                       scenario.limits.gamma_sing + 1e-9);
            }
        } else {
            cmd = detail::track_velocity(nominal, robot.theta, scenario.heading_gain);
        }
        cmd = clamp_command(cmd, scenario.limits);

        TraceRecord rec;
        rec.t = t;
        rec.robot = robot;
        rec.command = cmd;
        rec.wrench = measured;
        rec.estimate = est;
        rec.nominal_velocity = nominal;
        rec.desired_velocity = desired;
        for (const auto& ob : obstacles) rec.obstacle_positions.push_back(ob.center);
        trace.records.push_back(std::move(rec));

        // Actuate and integrate (velocities first, then pose).
        const double alpha =
            scenario.sim.actuator_lag > 0.0 ? dt / scenario.sim.actuator_lag : 1.0;
        robot.v += alpha * (cmd.v - robot.v);
        robot.omega += alpha * (cmd.omega - robot.omega);
        robot.x += robot.v * std::cos(robot.theta) * dt;
        robot.y += robot.v * std::sin(robot.theta) * dt;
        robot.theta = wrap_angle(robot.theta + robot.omega * dt);
        for (auto& ob : obstacles) ob.center += ob.velocity * dt;
    }
    return trace;
}

/// Post-collision statistics. The transient runs from first contact to the
/// start of the first window that stays within [0.5, 1.5] F_n for 0.3 s;
/// sliding statistics begin once that hold completes, so the qualifying
/// samples themselves still count as transient.
inline Metrics compute_metrics(const Trace& trace, double f_n) {
    if (trace.records.empty()) throw NoContact("empty trace");

    Metrics m;
    int first_contact = -1;
    for (size_t i = 0; i < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        m.peak_force = std::max(m.peak_force, std::hypot(r.wrench.fx, r.wrench.fy));
        if (r.estimate.in_contact && first_contact < 0)
            first_contact = static_cast<int>(i);
        for (size_t k = 0; k < trace.obstacles.size(); ++k) {
            if (!trace.obstacles[k].planner_visible) continue;
            Obstacle ob;
            ob.center = r.obstacle_positions[k];
            ob.radius = trace.obstacles[k].radius;
            m.min_gamma_margin =
                std::min(m.min_gamma_margin, gamma_of(ob, {r.robot.x, r.robot.y}));
        }
    }
    const auto& last = trace.records.back().robot;
    m.attractor_error = (Eigen::Vector2d(last.x, last.y) - trace.attractor).norm();
    if (first_contact < 0) throw NoContact("trace has no contact samples");

    const double lo = 0.5 * f_n;
    const double hi = 1.5 * f_n;
    const int hold = static_cast<int>(std::llround(0.3 / trace.dt));
    const int n = static_cast<int>(trace.records.size());

    auto force_at = [&](int i) {
        return std::hypot(trace.records[i].wrench.fx, trace.records[i].wrench.fy);
    };
    auto in_band = [&](int i) {
        const double f = force_at(i);
        return f >= lo && f <= hi;
    };

    int stable_start = -1;
    for (int i = first_contact; i + hold < n; ++i) {
        bool ok = true;
        for (int j = i; j <= i + hold; ++j) {
            if (!in_band(j)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            stable_start = i;
            break;
        }
    }
    if (stable_start < 0) return m;   // never stabilized

    m.transient_time = (stable_start - first_contact) * trace.dt;

    double sum = 0.0, sum2 = 0.0;
    int count = 0;
    for (int i = stable_start + hold; i < n; ++i) {
        if (!trace.records[i].estimate.in_contact) continue;
        const double f = force_at(i);
        sum += f;
        sum2 += f * f;
        ++count;
    }
    if (count > 0) {
        m.mean_slide_force = sum / count;
        m.std_slide_force =
            count > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / count) / (count - 1)))
                      : 0.0;
    }
    return m;
}

}  // namespace slideds
