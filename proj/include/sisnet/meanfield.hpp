#pragma once

#include <optional>
#include <vector>

#include "sisnet/graph.hpp"

namespace sisnet {

/// Per-agent infection and healing rates B = diag(beta), D = diag(delta).
struct VirusParams {
    Vector beta;
    Vector delta;

    static VirusParams homogeneous(int n, double beta, double delta);
    int agents() const { return static_cast<int>(beta.size()); }
    bool homogeneous_beta(double tol = 0.0) const;
    void validate() const;
};

/// Right-hand side of the n-intertwined model,
/// dp_i = (1 - p_i) beta_i sum_j a_ij p_j - delta_i p_i.
Vector mf_rhs(const Vector& p, const Matrix& a, const VirusParams& params);

struct MfOptions {
    double rel_tol = 1e-8;
    /// Kept below derivative_tol so decaying runs reach the stop threshold
    /// instead of stalling at the absolute-error floor.
    double abs_tol = 1e-13;
    double derivative_tol = 1e-12;
};

struct MfTrajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::optional<double> early_stop_time;
};

/// Adaptive RK solution sampled at the requested times; the state is clamped
/// to [0,1]^n after each accepted step; once the derivative inf-norm falls
/// below derivative_tol the state is held to the horizon.
MfTrajectory integrate_mf(const Vector& p0, const GraphTrajectory& traj,
                          const VirusParams& params, double horizon,
                          const std::vector<double>& sample_times, const MfOptions& opts = {});

struct AggregateTrajectory {
    std::vector<double> times;
    std::vector<double> susceptible;
    std::vector<double> infected;
};

/// Kermack-McKendrick aggregate SIS with beta applied to raw counts:
/// dS = -beta S I + delta I, dI = beta S I - delta I.
AggregateTrajectory aggregate_sis(double s0, double i0, double beta, double delta, double horizon,
                                  const std::vector<double>& sample_times);

/// Symmetric endemic fixed point of the homogeneous model on the complete
/// graph: p*_i = 1 - delta / (beta (n-1)), or 0 when subcritical.
Vector ndfe_complete_analytic(int n, double beta, double delta);

}  // namespace sisnet
