#pragma once

#include <cmath>
#include <Eigen/Core>

namespace slideds {

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * M_PI);
    if (w <= -M_PI) w = M_PI;
    return w;
}

/// Semicircular bumper hull: an arc of radius `bumper_radius` whose center
/// sits `center_offset` ahead of the robot control center. The sensing arc
/// covers bearings gamma in [-pi/2, pi/2] (frontal semicircle).
struct BumperGeometry {
    double bumper_radius{0.3};   // o [m], > 0
    double center_offset{0.2};   // l [m], >= 0

    bool valid() const { return bumper_radius > 0.0 && center_offset >= 0.0; }
};

/// Orthonormal surface frame at a contact bearing: n_hat points outward from
/// the bumper toward the obstacle, t_hat is the surface tangent (n rotated
/// by +pi/2).
struct ContactFrame {
    Eigen::Vector2d n_hat;
    Eigen::Vector2d t_hat;
};

/// Moment arm of the contact point seen from the robot control center.
struct HullArm {
    double arm_length{0.0};   // O [m], distance robot center -> contact point
    double bearing{0.0};      // beta [rad], bearing of contact point
};

inline ContactFrame contact_frame(double gamma) {
    const double c = std::cos(gamma);
    const double s = std::sin(gamma);
    return ContactFrame{Eigen::Vector2d(c, s), Eigen::Vector2d(-s, c)};
}

inline HullArm hull_arm(double gamma, const BumperGeometry& geom) {
    const double ax = geom.center_offset + geom.bumper_radius * std::cos(gamma);
    const double ay = geom.bumper_radius * std::sin(gamma);
    const double arm = std::hypot(ax, ay);
    // Contact point coincident with the robot center: bearing is undefined,
    // return 0 by convention.
    if (arm < 1e-12) return HullArm{arm, 0.0};
    return HullArm{arm, std::atan2(ay, ax)};
}

}  // namespace slideds
