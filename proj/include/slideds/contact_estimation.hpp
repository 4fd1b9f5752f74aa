#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "slideds/geometry.hpp"

namespace slideds {

/// Planar wrench measured at the bumper force/torque sensor.
struct Wrench {
    double fx{0.0};   // [N]
    double fy{0.0};   // [N]
    double mz{0.0};   // [N m]
};

/// Contact angle and force magnitude recovered from a wrench.
struct ContactEstimate {
    double gamma{0.0};    // [rad], in [-pi, pi]
    double f_mag{0.0};    // [N]
    bool in_contact{false};
};

/// Measurement inconsistent with a single contact on the bumper arc:
/// fx^2 + fy^2 < (mz/r)^2 beyond the numerical noise margin.
struct DegenerateWrench : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A wrench -> wrench map removing sensor/hull distortion. The identity model
/// stands in for hardware-calibrated models, which need physical impact data.
using CompensationModel = std::function<Wrench(const Wrench&)>;

inline CompensationModel identity_compensation() {
    return [](const Wrench& w) { return w; };
}

inline Wrench compensate(const Wrench& raw, const CompensationModel& model) {
    return model ? model(raw) : raw;
}

/// Sensor forward model: moment produced at the sensor by a force (fx, fy)
/// applied at bearing gamma on an arc of radius r.
inline Wrench forward_wrench(double gamma, double fx, double fy, double r) {
    return Wrench{fx, fy, fx * r * std::cos(gamma) - fy * r * std::sin(gamma)};
}

namespace detail {

/// Complex solution of the contact-angle equation; gamma is its real part.
/// For measurements consistent with the forward model the imaginary part
/// vanishes (up to roundoff).
inline std::complex<double> gamma_log_branch(const Wrench& w, double r) {
    const double a = w.mz / r;
    const double f2 = w.fx * w.fx + w.fy * w.fy;
    double radicand = f2 - a * a;
    if (radicand < 0.0) {
        if (radicand < -1e-6 * f2)
            throw DegenerateWrench("wrench inconsistent with single arc contact");
        radicand = 0.0;
    }
    const std::complex<double> num(a, std::sqrt(radicand));
    const std::complex<double> den(w.fx, w.fy);
    const std::complex<double> i(0.0, 1.0);
    return -i * std::log(num / den);
}

}  // namespace detail

inline ContactEstimate estimate_contact(const Wrench& w, double r,
                                        double contact_threshold) {
    const double f_norm = std::hypot(w.fx, w.fy);
    if (f_norm < contact_threshold || f_norm == 0.0) return ContactEstimate{};

    const double gamma = wrap_angle(detail::gamma_log_branch(w, r).real());
    const double f_mag = w.fx * std::sin(gamma) + w.fy * std::cos(gamma);
    return ContactEstimate{gamma, f_mag, true};
}

}  // namespace slideds
