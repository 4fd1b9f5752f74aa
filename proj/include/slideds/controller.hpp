#pragma once

#include <cmath>
#include <Eigen/Core>

#include "slideds/contact_estimation.hpp"
#include "slideds/geometry.hpp"

namespace slideds {

/// Gains and limits of the force-limited sliding controller.
struct ControllerParams {
    double f_n_limit{45.0};        // F_n [N], regulated contact force
    double lambda_t{0.0};          // tangential damping
    double lambda_n{0.5};          // normal damping
    double virtual_mass{2.0};      // M [kg]
    double ts{0.005};              // T_s [s], control period
    double max_slide_speed{0.5};   // bound on the nominal DS magnitude [m/s]
    double release_deadband{0.05}; // cosine hysteresis on the release test

    bool valid() const {
        return f_n_limit > 0.0 && virtual_mass > 0.0 && ts > 0.0 &&
               max_slide_speed > 0.0 && lambda_n > 0.0 && lambda_t >= 0.0;
    }
};

/// Everything the controller needs for one step. f_c is the measured contact
/// force projected on the outward normal; a physical reaction gives f_c <= 0,
/// so (F_n + f_c) vanishes exactly when the applied force reaches F_n.
struct ContactState {
    ContactFrame frame;
    double f_c{0.0};                         // [N], <= 0 in contact
    Eigen::Vector2d nominal_velocity{0, 0};  // xi_dot_u at the contact point
    Eigen::Vector2d previous_desired{0, 0};  // xi_dot_d from the last step
};

inline Eigen::Vector2d clamp_speed(const Eigen::Vector2d& v, double max) {
    const double n = v.norm();
    if (n <= max) return v;
    return v * (max / n);
}

/// D = Q diag(lambda_t, lambda_n) Q^T with Q = [t_hat n_hat].
inline Eigen::Matrix2d damping_matrix(const ContactFrame& frame,
                                      double lambda_t, double lambda_n) {
    return lambda_t * frame.t_hat * frame.t_hat.transpose() +
           lambda_n * frame.n_hat * frame.n_hat.transpose();
}

/// Tangential projection of the nominal momentum rate.
inline Eigen::Vector2d tangential_drive(const Eigen::Vector2d& xi_dot_u,
                                        const ContactFrame& frame,
                                        double virtual_mass, double ts) {
    const Eigen::Vector2d rate = virtual_mass * xi_dot_u / ts;
    return frame.t_hat.dot(rate) * frame.t_hat;
}

/// Robot state relative to a (possibly moving) obstacle; the controller runs
/// unchanged on relative coordinates.
inline std::pair<Eigen::Vector2d, Eigen::Vector2d> relative_state(
    const Eigen::Vector2d& robot_pos, const Eigen::Vector2d& robot_vel,
    const Eigen::Vector2d& obstacle_pos, const Eigen::Vector2d& obstacle_vel) {
    return {robot_pos - obstacle_pos, robot_vel - obstacle_vel};
}

/// One velocity-domain compliance step: regulate the normal force toward
/// F_n, pass the nominal motion through tangentially, and add the release
/// term when the nominal DS points away from the surface.
inline Eigen::Vector2d step(const ContactState& cs, const ControllerParams& p) {
    const Eigen::Vector2d xi_u = clamp_speed(cs.nominal_velocity, p.max_slide_speed);
    const Eigen::Matrix2d d = damping_matrix(cs.frame, p.lambda_t, p.lambda_n);

    Eigen::Vector2d out =
        (p.ts / p.virtual_mass) *
            ((p.f_n_limit + cs.f_c) * cs.frame.n_hat - d * cs.previous_desired) +
        cs.frame.t_hat.dot(xi_u) * cs.frame.t_hat;

    const double normal_drive = cs.frame.n_hat.dot(xi_u);
    if (normal_drive < -p.release_deadband * xi_u.norm())
        out += normal_drive * cs.frame.n_hat;
    return out;
}

/// Engagement bookkeeping around `step`: activates on contact, deactivates
/// once contact has been absent for `disengage_after` seconds, and keeps the
/// last contact bearing and desired velocity across brief dropouts.
class ComplianceController {
public:
    ComplianceController() = default;
    ComplianceController(const ControllerParams& params, double disengage_after = 0.1)
        : params_(params), disengage_after_(disengage_after) {}

    /// Feed this cycle's estimate; returns whether the controller is engaged.
    bool observe(const ContactEstimate& est, double dt) {
        if (est.in_contact) {
            engaged_ = true;
            out_of_contact_ = 0.0;
            last_gamma_ = est.gamma;
        } else if (engaged_) {
            out_of_contact_ += dt;
            if (out_of_contact_ >= disengage_after_) reset();
        }
        return engaged_;
    }

    /// Run one step against the current estimate. `nominal_velocity` is the
    /// body-frame nominal DS velocity, already relative to the obstacle when
    /// it moves. Call only while engaged.
    Eigen::Vector2d command(const ContactEstimate& est,
                            const Eigen::Vector2d& nominal_velocity) {
        const double gamma = est.in_contact ? est.gamma : last_gamma_;
        ContactState cs;
        cs.frame = contact_frame(gamma);
        cs.f_c = est.in_contact ? -est.f_mag : 0.0;
        cs.nominal_velocity = nominal_velocity;
        cs.previous_desired = previous_desired_;
        previous_desired_ = step(cs, params_);
        return previous_desired_;
    }

    void reset() {
        engaged_ = false;
        out_of_contact_ = 0.0;
        previous_desired_.setZero();
    }

    bool engaged() const { return engaged_; }
    double last_gamma() const { return last_gamma_; }
    const ControllerParams& params() const { return params_; }

private:
    ControllerParams params_{};
    double disengage_after_{0.1};
    bool engaged_{false};
    double out_of_contact_{0.0};
    double last_gamma_{0.0};
    Eigen::Vector2d previous_desired_{0.0, 0.0};
};

}  // namespace slideds
