#include "sisnet/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sisnet/detail/rk45.hpp"

namespace sisnet {

VirusParams VirusParams::homogeneous(int n, double beta, double delta) {
    VirusParams p;
    p.beta = Vector::Constant(n, beta);
    p.delta = Vector::Constant(n, delta);
    p.validate();
    return p;
}

bool VirusParams::homogeneous_beta(double tol) const {
    for (Eigen::Index i = 1; i < beta.size(); ++i)
        if (std::abs(beta(i) - beta(0)) > tol) return false;
    return true;
}

void VirusParams::validate() const {
    if (beta.size() != delta.size() || beta.size() == 0)
        throw InvalidInput("VirusParams: beta/delta size mismatch");
    if (beta.minCoeff() < 0.0 || delta.minCoeff() < 0.0)
        throw InvalidInput("VirusParams: rates must be nonnegative");
}

Vector mf_rhs(const Vector& p, const Matrix& a, const VirusParams& params) {
    const Vector force = a * p;
    return (Vector::Ones(p.size()) - p).cwiseProduct(params.beta.cwiseProduct(force)) -
           params.delta.cwiseProduct(p);
}

namespace {

void clamp_unit_box(Vector& p) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::clamp(p(i), 0.0, 1.0);
}

}  // namespace

MfTrajectory integrate_mf(const Vector& p0, const GraphTrajectory& traj,
                          const VirusParams& params, double horizon,
                          const std::vector<double>& sample_times, const MfOptions& opts) {
    if (horizon <= 0.0) throw InvalidInput("integrate_mf: horizon must be positive");
    params.validate();
    if (p0.size() != traj.agents() || p0.size() != params.beta.size())
        throw InvalidInput("integrate_mf: dimension mismatch");
    if (p0.minCoeff() < 0.0 || p0.maxCoeff() > 1.0)
        throw InvalidInput("integrate_mf: p0 must lie in [0,1]^n");

    std::set<double> knots(sample_times.begin(), sample_times.end());
    knots.insert(horizon);
    for (double c : traj.change_times())
        if (c > 0.0 && c < horizon) knots.insert(c);
    knots.erase(0.0);
    std::set<double> wanted(sample_times.begin(), sample_times.end());
    wanted.insert(horizon);

    MfTrajectory out;
    Vector p = p0;
    double t = 0.0;
    if (wanted.count(0.0)) {
        out.times.push_back(0.0);
        out.states.push_back(p);
    }

    detail::Rk45Options ro;
    ro.rel_tol = opts.rel_tol;
    ro.abs_tol = opts.abs_tol;
    ro.postprocess = clamp_unit_box;

    const auto& changes = traj.change_times();
    bool held = false;
    for (double knot : knots) {
        if (knot > horizon) break;
        if (!held) {
            // Only allow a hold to the horizon when no graph change lies ahead.
            auto next_change = std::upper_bound(changes.begin(), changes.end(), t);
            const bool static_remainder =
                !traj.piecewise_constant() ? false
                                           : (next_change == changes.end() || *next_change >= horizon);
            ro.derivative_tol = static_remainder ? opts.derivative_tol : 0.0;
            if (traj.piecewise_constant()) {
                const Matrix a = traj.sample(t);
                auto rhs = [&](double, const Vector& pp) { return mf_rhs(pp, a, params); };
                auto res = detail::rk45(rhs, t, p, knot, ro);
                p = res.y;
                if (res.early_stopped) {
                    held = true;
                    out.early_stop_time = res.stop_time;
                }
            } else {
                auto rhs = [&](double tt, const Vector& pp) {
                    return mf_rhs(pp, traj.sample(tt), params);
                };
                auto res = detail::rk45(rhs, t, p, knot, ro);
                p = res.y;
            }
        }
        t = knot;
        if (wanted.count(knot)) {
            out.times.push_back(knot);
            out.states.push_back(p);
        }
    }
    return out;
}

AggregateTrajectory aggregate_sis(double s0, double i0, double beta, double delta, double horizon,
                                  const std::vector<double>& sample_times) {
    if (s0 + i0 <= 0.0 || s0 < 0.0 || i0 < 0.0)
        throw InvalidInput("aggregate_sis: need S0, I0 >= 0 with S0 + I0 > 0");
    std::set<double> wanted(sample_times.begin(), sample_times.end());
    wanted.insert(horizon);
    AggregateTrajectory out;
    Vector x(2);
    x << s0, i0;
    double t = 0.0;
    if (wanted.count(0.0)) {
        out.times.push_back(0.0);
        out.susceptible.push_back(s0);
        out.infected.push_back(i0);
    }
    auto rhs = [&](double, const Vector& v) {
        Vector d(2);
        const double flow = beta * v(0) * v(1) - delta * v(1);
        d << -flow, flow;
        return d;
    };
    detail::Rk45Options ro;
    ro.rel_tol = 1e-10;
    ro.abs_tol = 1e-12;
    ro.derivative_tol = 1e-13;
    bool held = false;
    for (double knot : wanted) {
        if (knot <= 0.0) continue;
        if (knot > horizon) break;
        if (!held) {
            auto res = detail::rk45(rhs, t, x, knot, ro);
            x = res.y;
            held = res.early_stopped;
        }
        t = knot;
        out.times.push_back(knot);
        out.susceptible.push_back(x(0));
        out.infected.push_back(x(1));
    }
    return out;
}

Vector ndfe_complete_analytic(int n, double beta, double delta) {
    if (n < 2) throw InvalidInput("ndfe_complete_analytic: need n >= 2");
    if (beta <= 0.0 || beta * (n - 1) <= delta) return Vector::Zero(n);
    return Vector::Constant(n, 1.0 - delta / (beta * (n - 1)));
}

}  // namespace sisnet
