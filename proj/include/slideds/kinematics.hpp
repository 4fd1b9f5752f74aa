#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <Eigen/Core>

#include "slideds/geometry.hpp"

namespace slideds {

/// Differential-drive command: forward speed and yaw rate.
struct RobotCommand {
    double v{0.0};       // [m/s]
    double omega{0.0};   // [rad/s]
};

/// Hardware envelope of the base, plus the bearing beyond which the bumper
/// Jacobian is treated as singular.
struct KinematicLimits {
    double v_max{1.5};                        // [m/s]
    double omega_max{4.124};                  // [rad/s]
    double gamma_sing{80.0 * M_PI / 180.0};   // [rad]
};

/// Requested contact bearing too close to +-pi/2: the inverse mapping cannot
/// realize a normal-direction velocity there.
struct SingularConfiguration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// J maps (v, omega) to the velocity of the contact point at bearing gamma.
inline Eigen::Matrix2d jacobian(double gamma, double o) {
    Eigen::Matrix2d j;
    j << 1.0, -o * std::sin(gamma),
         0.0,  o * std::cos(gamma);
    return j;
}

inline Eigen::Vector2d to_contact_velocity(const RobotCommand& cmd, double gamma,
                                           double o) {
    return jacobian(gamma, o) * Eigen::Vector2d(cmd.v, cmd.omega);
}

/// Scalar velocity toward the surface normal through the exact hull arm
/// (diagnostic companion to the vector mapping).
inline double effective_normal_velocity(const RobotCommand& cmd, double gamma,
                                        const HullArm& arm) {
    return cmd.v * std::cos(gamma) +
           cmd.omega * arm.arm_length * std::sin(gamma - arm.bearing);
}

inline RobotCommand to_robot_command(const Eigen::Vector2d& xi_dot, double gamma,
                                     double o,
                                     double gamma_sing = 80.0 * M_PI / 180.0) {
    if (std::abs(std::cos(gamma)) < std::cos(gamma_sing))
        throw SingularConfiguration("contact bearing beyond invertible range");
    const double cg = std::cos(gamma);
    const double v = xi_dot.x() + std::tan(gamma) * xi_dot.y();
    const double omega = xi_dot.y() / (o * cg);
    return RobotCommand{v, omega};
}

inline RobotCommand clamp_command(const RobotCommand& cmd, const KinematicLimits& lim) {
    return RobotCommand{std::clamp(cmd.v, -lim.v_max, lim.v_max),
                        std::clamp(cmd.omega, -lim.omega_max, lim.omega_max)};
}

}  // namespace slideds
