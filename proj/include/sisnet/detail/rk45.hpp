#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "sisnet/errors.hpp"

namespace sisnet::detail {

using Eigen::VectorXd;

struct Rk45Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    /// Early stop: once the accepted-step derivative's inf-norm falls below
    /// this, the state is held for the remainder of the interval. 0 disables.
    double derivative_tol = 0.0;
    double max_step = 0.0;  // 0 = no cap
    /// Applied to the state after every accepted step (e.g. clamping to [0,1]).
    std::function<void(VectorXd&)> postprocess;
};

struct Rk45Result {
    VectorXd y;
    bool early_stopped = false;
    double stop_time = 0.0;  // valid when early_stopped
};

/// Dormand-Prince 5(4) with PI-free standard step control. Integrates
/// y' = f(t, y) from t0 to t1 (t1 > t0).
inline Rk45Result rk45(const std::function<VectorXd(double, const VectorXd&)>& f, double t0,
                       VectorXd y, double t1, const Rk45Options& opts = {}) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    VectorXd k1 = f(t, y);
    if (opts.derivative_tol > 0.0 && k1.lpNorm<Eigen::Infinity>() < opts.derivative_tol)
        return {y, true, t};

    double h = std::min(1e-2 * (t1 - t0), 1.0);
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    VectorXd k2, k3, k4, k5, k6, k7, ynew;
    int consecutive_rejects = 0;
    while (t < t1) {
        h = std::min(h, t1 - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw NumericalFailure("rk45: step size underflow at t = " + std::to_string(t));
        k2 = f(t + c2 * h, y + h * (a21 * k1));
        k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = f(t + h, ynew);
        VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double norm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc =
                opts.abs_tol + opts.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            norm = std::max(norm, std::abs(err(i)) / sc);
        }
        if (norm <= 1.0) {
            t += h;
            y = std::move(ynew);
            if (opts.postprocess) {
                opts.postprocess(y);
                k1 = f(t, y);  // FSAL invalidated by postprocessing
            } else {
                k1 = k7;
            }
            if (opts.derivative_tol > 0.0 &&
                k1.lpNorm<Eigen::Infinity>() < opts.derivative_tol)
                return {y, true, t};
            consecutive_rejects = 0;
        } else if (++consecutive_rejects > 200) {
            throw NumericalFailure("rk45: repeated step rejection at t = " + std::to_string(t));
        }
        double factor = 0.9 * std::pow(std::max(norm, 1e-10), -0.2);
        h *= std::clamp(factor, 0.2, 5.0);
        if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    }
    return {y, false, 0.0};
}

}  // namespace sisnet::detail
