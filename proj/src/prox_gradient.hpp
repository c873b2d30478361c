#pragma once

// Monotone accelerated proximal gradient used by every inner solver.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace sparsetask::detail {

struct ProxGradientOptions {
    int max_iters = 100;
    bool acceleration = true;
    double step_tol = 1e-12;
};

/// Minimizes smooth(x) + penalty(x) from a feasible start `x0`.
///
/// `value_grad(y, &grad)` returns smooth(y) and writes its gradient;
/// `prox(z, step)` is the proximity operator of step * penalty. The step is
/// 1/lipschitz and is halved whenever the quadratic upper bound fails, so
/// an underestimated lipschitz only costs extra evaluations. Momentum is
/// reset whenever the composite objective would increase, which keeps the
/// returned sequence of objectives non-increasing. Returns the best point;
/// `objective_out` receives its composite objective.
template <typename Point, typename ValueGrad, typename Smooth, typename Prox, typename Penalty>
Point accelerated_prox_gradient(Point x0, double lipschitz, const ProxGradientOptions& opts,
                                ValueGrad&& value_grad, Smooth&& smooth, Prox&& prox,
                                Penalty&& penalty, double* objective_out,
                                std::vector<double>* trace = nullptr) {
    Point x = std::move(x0);
    double fx = smooth(x) + penalty(x);
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
        if (objective_out) *objective_out = fx;
        return x;
    }
    double lip = lipschitz;
    Point y = x;
    Point grad;
    double t = 1.0;
    bool restarted_last = false;

    for (int k = 0; k < opts.max_iters; ++k) {
        const double fy = value_grad(y, &grad);
        Point z;
        double fz_smooth = 0.0;
        double sq_dist = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            z = prox(Point(y - grad / lip), 1.0 / lip);
            const Point diff = z - y;
            sq_dist = diff.squaredNorm();
            fz_smooth = smooth(z);
            const double model = fy + (grad.array() * diff.array()).sum() + 0.5 * lip * sq_dist;
            if (fz_smooth <= model + 1e-14 * std::abs(fy)) break;
            lip *= 2.0;
        }
        const double fz = fz_smooth + penalty(z);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));

        if (fz <= fx) {
            const double move = (z - x).norm();
            const Point x_prev = std::move(x);
            x = std::move(z);
            fx = fz;
            if (trace) trace->push_back(fx);
            if (opts.acceleration) {
                y = x + ((t - 1.0) / t_next) * (x - x_prev);
                t = t_next;
            } else {
                y = x;
            }
            restarted_last = false;
            if (move <= opts.step_tol * std::max(1.0, x.norm())) break;
        } else {
            // momentum overshot; restart from the best point
            if (restarted_last || !opts.acceleration) break;
            y = x;
            t = 1.0;
            restarted_last = true;
        }
        if (std::sqrt(sq_dist) <= opts.step_tol * std::max(1.0, y.norm()) && !restarted_last) {
            break;
        }
    }
    if (objective_out) *objective_out = fx;
    return x;
}

/// Largest eigenvalue of a symmetric PSD operator by power iteration from
/// the normalized all-ones start. `apply(v)` returns A v.
template <typename Point, typename Apply>
double power_iteration(Point start, int iters, Apply&& apply) {
    double norm = start.norm();
    if (norm == 0.0) return 0.0;
    start /= norm;
    double estimate = 0.0;
    for (int i = 0; i < iters; ++i) {
        Point next = apply(start);
        norm = next.norm();
        if (norm == 0.0) return estimate;
        estimate = norm;
        start = next / norm;
    }
    return estimate;
}

}  // namespace sparsetask::detail
