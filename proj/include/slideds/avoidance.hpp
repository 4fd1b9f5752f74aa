#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>
#include <Eigen/Core>

#include "slideds/controller.hpp"

namespace slideds {

/// Linear attractor field with a speed cap: the nominal pre-collision motion.
struct AttractorDS {
    Eigen::Vector2d attractor{0.0, 0.0};
    double gain{1.0};    // [1/s]
    double v_max{0.5};   // [m/s]
};

struct Obstacle {
    Eigen::Vector2d center{0.0, 0.0};
    double radius{0.0};
    Eigen::Vector2d velocity{0.0, 0.0};
    bool planner_visible{true};
};

using ObstacleSet = std::vector<Obstacle>;

/// Evaluation point inside a planner-visible obstacle (Gamma < 1).
struct InsideObstacle : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Eigen::Vector2d linear_ds(const Eigen::Vector2d& x, const AttractorDS& ds) {
    return clamp_speed(ds.gain * (ds.attractor - x), ds.v_max);
}

/// Normalized distance function: > 1 outside, = 1 on the boundary.
inline double gamma_of(const Obstacle& ob, const Eigen::Vector2d& x) {
    const double d = (x - ob.center).norm() / ob.radius;
    return d * d;
}

namespace detail {

inline Eigen::Vector2d modulate_single(const Eigen::Vector2d& v,
                                       const Eigen::Vector2d& x,
                                       const Obstacle& ob, double gamma) {
    const Eigen::Vector2d rel = x - ob.center;
    const Eigen::Vector2d r_hat = rel / rel.norm();
    const Eigen::Vector2d e_hat(-r_hat.y(), r_hat.x());
    const double lam_r = 1.0 - 1.0 / gamma;
    const double lam_e = 1.0 + 1.0 / gamma;
    const Eigen::Matrix2d m = lam_r * r_hat * r_hat.transpose() +
                              lam_e * e_hat * e_hat.transpose();
    // Moving obstacles are avoided in their own frame.
    return m * (v - ob.velocity) + ob.velocity;
}

}  // namespace detail

/// Deflect the nominal velocity around every planner-visible obstacle. The
/// normal component vanishes on each boundary; far from all obstacles the
/// deviation decays as 1/Gamma. Obstacles with planner_visible == false are
/// ignored entirely.
inline Eigen::Vector2d modulate(const Eigen::Vector2d& v_nominal,
                                const Eigen::Vector2d& x,
                                const ObstacleSet& obstacles) {
    std::vector<const Obstacle*> visible;
    for (const auto& ob : obstacles)
        if (ob.planner_visible) visible.push_back(&ob);
    if (visible.empty()) return v_nominal;

    std::vector<double> gammas(visible.size());
    for (size_t i = 0; i < visible.size(); ++i) {
        gammas[i] = gamma_of(*visible[i], x);
        if (gammas[i] < 1.0 - 1e-12)
            throw InsideObstacle("evaluation point inside a visible obstacle");
    }

    if (visible.size() == 1)
        return detail::modulate_single(v_nominal, x, *visible[0], gammas[0]);

    // Gamma-weighted aggregation; the weight of obstacle i carries the
    // boundary distances of all others, so on any boundary that obstacle
    // takes over completely and impenetrability is preserved.
    std::vector<double> weights(visible.size(), 1.0);
    double total = 0.0;
    for (size_t i = 0; i < visible.size(); ++i) {
        for (size_t j = 0; j < visible.size(); ++j)
            if (j != i) weights[i] *= std::max(gammas[j] - 1.0, 0.0);
        total += weights[i];
    }

    if (total <= 0.0) {
        // Simultaneously on several boundaries; defer to the closest.
        size_t closest = 0;
        for (size_t i = 1; i < visible.size(); ++i)
            if (gammas[i] < gammas[closest]) closest = i;
        return detail::modulate_single(v_nominal, x, *visible[closest], gammas[closest]);
    }

    Eigen::Vector2d out(0.0, 0.0);
    for (size_t i = 0; i < visible.size(); ++i)
        out += (weights[i] / total) *
               detail::modulate_single(v_nominal, x, *visible[i], gammas[i]);
    return out;
}

}  // namespace slideds
