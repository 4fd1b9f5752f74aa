#include "slideds/simulator.hpp"

#include <cmath>
#include <gtest/gtest.h>

using namespace slideds;
using Eigen::Vector2d;

namespace {

Scenario base_scenario() {
    Scenario s;
    s.bumper = BumperGeometry{0.3, 0.0};
    s.sim.dt = 0.005;
    s.sim.duration = 25.0;
    s.sim.contact_stiffness = 5000.0;
    s.sim.contact_damping = 300.0;
    s.sim.actuator_lag = 0.2;
    s.sim.seed = 1;
    s.attractor = AttractorDS{{4.5, 0.0}, 1.0, 0.5};
    s.heading_gain = 0.8;
    return s;
}

Obstacle static_obstacle(double x, double y, double radius, bool visible = false) {
    return Obstacle{{x, y}, radius, {0.0, 0.0}, visible};
}

}  // namespace

TEST(ContactWrench, NoOverlapGivesZero) {
    RobotState robot;
    BumperGeometry geom{0.3, 0.2};
    const auto res =
        contact_wrench(robot, geom, {static_obstacle(2.0, 0.0, 0.3)}, 5000, 50);
    EXPECT_FALSE(res.contact);
    EXPECT_EQ(res.wrench.fx, 0.0);
    EXPECT_EQ(res.wrench.fy, 0.0);
    EXPECT_EQ(res.wrench.mz, 0.0);
}

TEST(ContactWrench, HeadOnSpringLaw) {
    // 9 mm penetration at k = 5000 gives exactly the 45 N default limit.
    RobotState robot;
    BumperGeometry geom{0.3, 0.2};
    const auto res =
        contact_wrench(robot, geom, {static_obstacle(0.791, 0.0, 0.3)}, 5000, 0);
    ASSERT_TRUE(res.contact);
    EXPECT_NEAR(res.penetration, 0.009, 1e-12);
    EXPECT_NEAR(res.gamma, 0.0, 1e-12);
    EXPECT_NEAR(std::hypot(res.wrench.fx, res.wrench.fy), 45.0, 1e-9);
    const Wrench expected =
        forward_wrench(res.gamma, res.wrench.fx, res.wrench.fy, geom.bumper_radius);
    EXPECT_NEAR(res.wrench.mz, expected.mz, 1e-12);
}

TEST(ContactWrench, DeepestObstacleWins) {
    RobotState robot;
    BumperGeometry geom{0.3, 0.0};
    ObstacleSet obstacles = {static_obstacle(0.55, 0.0, 0.3),     // 50 mm deep
                             static_obstacle(0.58, 0.05, 0.3)};   // shallower
    const auto res = contact_wrench(robot, geom, obstacles, 5000, 0);
    ASSERT_TRUE(res.contact);
    EXPECT_EQ(res.obstacle_index, 0);
    EXPECT_NEAR(res.penetration, 0.05, 1e-12);
}

TEST(ContactWrench, BehindSensingArcIgnored) {
    RobotState robot;
    BumperGeometry geom{0.3, 0.0};
    const auto res =
        contact_wrench(robot, geom, {static_obstacle(-0.4, 0.0, 0.3)}, 5000, 0);
    EXPECT_FALSE(res.contact);
}

TEST(ContactWrench, DampingResistsApproachAndBrakesRebound) {
    BumperGeometry geom{0.3, 0.0};
    RobotState approaching;
    approaching.v = 0.5;   // toward the obstacle ahead
    const auto in =
        contact_wrench(approaching, geom, {static_obstacle(0.59, 0.0, 0.3)}, 5000, 300);
    RobotState retreating;
    retreating.v = -0.5;
    const auto out =
        contact_wrench(retreating, geom, {static_obstacle(0.59, 0.0, 0.3)}, 5000, 300);
    const double spring = 5000.0 * 0.01;
    EXPECT_GT(std::hypot(in.wrench.fx, in.wrench.fy), spring);
    EXPECT_LT(std::hypot(out.wrench.fx, out.wrench.fy), spring);
    EXPECT_GE(std::hypot(out.wrench.fx, out.wrench.fy), 0.0);
}

// Spring-damper passivity: a held mass oscillating against the contact law
// loses amplitude with damping and keeps it without.
TEST(PenetrationForce, OscillationDecays) {
    const double mass = 2.0, k = 5000.0, hold = 45.0;
    const double delta_eq = hold / k;
    auto run = [&](double c) {
        double delta = delta_eq, vel = 0.2, dt = 1e-5;
        std::vector<double> peaks;
        double prev = 0.0, prev2 = 0.0;
        for (int i = 0; i < 40000; ++i) {
            const double acc = (hold - penetration_force(delta, vel, k, c)) / mass;
            vel += acc * dt;
            delta += vel * dt;
            const double dev = std::abs(delta - delta_eq);
            if (prev > prev2 && prev > dev && prev > 1e-5) peaks.push_back(prev);
            prev2 = prev;
            prev = dev;
        }
        return peaks;
    };

    const auto damped = run(50.0);
    ASSERT_GE(damped.size(), 3u);
    EXPECT_LT(damped[2], 0.5 * damped[0]);

    const auto undamped = run(0.0);
    ASSERT_GE(undamped.size(), 3u);
    EXPECT_NEAR(undamped[2] / undamped[0], 1.0, 0.02);
}

TEST(Simulate, SensorModelConsistency) {
    // estimate_contact on contact_wrench output recovers the true bearing.
    BumperGeometry geom{0.3, 0.1};
    RobotState robot;
    robot.theta = 0.3;
    for (int i = -85; i <= 85; i += 5) {
        const double gamma = i * M_PI / 180.0;
        const double depth = 0.012;
        const double heading = robot.theta + gamma;
        const Vector2d bumper_center(geom.center_offset * std::cos(robot.theta),
                                     geom.center_offset * std::sin(robot.theta));
        const Vector2d center =
            bumper_center +
            (geom.bumper_radius + 0.3 - depth) * Vector2d(std::cos(heading),
                                                          std::sin(heading));
        const auto sensed = contact_wrench(
            robot, geom, {Obstacle{center, 0.3, {0, 0}, false}}, 5000, 300);
        ASSERT_TRUE(sensed.contact) << i;
        const auto est = estimate_contact(sensed.wrench, geom.bumper_radius, 2.0);
        ASSERT_TRUE(est.in_contact) << i;
        EXPECT_NEAR(est.gamma, gamma, 1e-6) << i;
        EXPECT_NEAR(est.f_mag, 5000.0 * depth, 1e-9) << i;
    }
}

TEST(Simulate, EmptyWorldRegression) {
    Scenario s = base_scenario();
    s.sim.duration = 12.0;
    s.attractor.v_max = 1.0;
    const Trace trace = simulate(s);
    for (const auto& r : trace.records) {
        EXPECT_EQ(r.wrench.fx, 0.0);
        EXPECT_EQ(r.wrench.fy, 0.0);
        EXPECT_EQ(r.wrench.mz, 0.0);
        EXPECT_FALSE(r.estimate.in_contact);
    }
    const auto& last = trace.records.back().robot;
    EXPECT_LT((Vector2d(last.x, last.y) - trace.attractor).norm(), 0.05);
    EXPECT_THROW(compute_metrics(trace, 45.0), NoContact);
}

TEST(Simulate, DeterministicWithSeededNoise) {
    Scenario s = base_scenario();
    s.sim.duration = 8.0;
    s.sim.sensor_noise_std = 0.5;
    s.sim.seed = 42;
    s.obstacles = {static_obstacle(2.0, 0.1, 0.3)};
    const Trace a = simulate(s);
    const Trace b = simulate(s);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        const auto& ra = a.records[i];
        const auto& rb = b.records[i];
        EXPECT_EQ(ra.robot.x, rb.robot.x);
        EXPECT_EQ(ra.robot.y, rb.robot.y);
        EXPECT_EQ(ra.robot.theta, rb.robot.theta);
        EXPECT_EQ(ra.wrench.fx, rb.wrench.fx);
        EXPECT_EQ(ra.wrench.fy, rb.wrench.fy);
        EXPECT_EQ(ra.wrench.mz, rb.wrench.mz);
        EXPECT_EQ(ra.command.v, rb.command.v);
        EXPECT_EQ(ra.command.omega, rb.command.omega);
    }
}

TEST(Simulate, SeedChangesNoisyTrace) {
    Scenario s = base_scenario();
    s.sim.duration = 4.0;
    s.sim.sensor_noise_std = 0.5;
    s.obstacles = {static_obstacle(1.2, 0.1, 0.3)};
    s.sim.seed = 1;
    const Trace a = simulate(s);
    s.sim.seed = 2;
    const Trace b = simulate(s);
    bool differs = false;
    for (size_t i = 0; i < a.records.size() && !differs; ++i)
        differs = a.records[i].wrench.fx != b.records[i].wrench.fx;
    EXPECT_TRUE(differs);
}

TEST(Simulate, ClosedLoopForceConvergence) {
    Scenario s = base_scenario();
    s.obstacles = {static_obstacle(2.0, 0.1, 0.3)};
    const Trace trace = simulate(s);
    const Metrics m = compute_metrics(trace, 45.0);
    ASSERT_FALSE(std::isnan(m.transient_time));
    EXPECT_GE(m.mean_slide_force, 0.9 * 45.0);
    EXPECT_LE(m.mean_slide_force, 1.1 * 45.0);
}

TEST(Simulate, StartInsideVisibleObstacleRejected) {
    Scenario s = base_scenario();
    s.obstacles = {static_obstacle(0.1, 0.0, 0.5, true)};
    EXPECT_THROW(simulate(s), ScenarioError);
    // adversarial contact at t = 0 is legitimate
    s.obstacles = {static_obstacle(0.1, 0.0, 0.5, false)};
    EXPECT_NO_THROW(simulate(s));
}

TEST(Metrics, ConstantForceTrace) {
    Trace trace;
    trace.dt = 0.005;
    trace.f_n = 45.0;
    trace.attractor = {0.0, 0.0};
    for (int i = 0; i < 400; ++i) {
        TraceRecord r;
        r.t = i * trace.dt;
        if (i >= 100) {
            r.wrench = Wrench{0.0, 45.0, 0.0};
            r.estimate = ContactEstimate{0.0, 45.0, true};
        }
        trace.records.push_back(r);
    }
    const Metrics m = compute_metrics(trace, 45.0);
    EXPECT_DOUBLE_EQ(m.transient_time, 0.0);
    EXPECT_DOUBLE_EQ(m.mean_slide_force, 45.0);
    EXPECT_DOUBLE_EQ(m.std_slide_force, 0.0);
    EXPECT_DOUBLE_EQ(m.peak_force, 45.0);
}

TEST(Metrics, NeverStabilizedLeavesTransientUnset) {
    Trace trace;
    trace.dt = 0.005;
    trace.f_n = 45.0;
    for (int i = 0; i < 400; ++i) {
        TraceRecord r;
        r.t = i * trace.dt;
        // alternate far above and far below the band
        const double f = (i / 20) % 2 == 0 ? 200.0 : 3.0;
        r.wrench = Wrench{0.0, f, 0.0};
        r.estimate = ContactEstimate{0.0, f, true};
        trace.records.push_back(r);
    }
    const Metrics m = compute_metrics(trace, 45.0);
    EXPECT_TRUE(std::isnan(m.transient_time));
    EXPECT_TRUE(std::isnan(m.mean_slide_force));
    EXPECT_DOUBLE_EQ(m.peak_force, 200.0);
}

TEST(Metrics, GammaMarginAndAttractorError) {
    Trace trace;
    trace.dt = 0.005;
    trace.f_n = 45.0;
    trace.attractor = {1.0, 0.0};
    trace.obstacles = {{0.5, true}, {0.5, false}};
    TraceRecord r;
    r.t = 0.0;
    r.robot.x = 2.0;
    r.wrench = Wrench{0.0, 45.0, 0.0};
    r.estimate = ContactEstimate{0.0, 45.0, true};
    r.obstacle_positions = {{3.0, 0.0}, {2.05, 0.0}};
    trace.records.push_back(r);
    // a second record so the hold window cannot complete
    r.t = 0.005;
    trace.records.push_back(r);

    const Metrics m = compute_metrics(trace, 45.0);
    // visible obstacle at distance 1.0, radius 0.5 -> Gamma = 4; the
    // invisible one right next to the robot must not count
    EXPECT_NEAR(m.min_gamma_margin, 4.0, 1e-12);
    EXPECT_NEAR(m.attractor_error, 1.0, 1e-12);
}
