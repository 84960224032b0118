#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sisnet/graph.hpp"
#include "sisnet/meanfield.hpp"

namespace sisnet {

/// lambda_1(BA(t) - D) along a time grid (spectral abscissa s_1 when the
/// matrix is not symmetric).
struct SpectralTrace {
    std::vector<double> times;
    std::vector<double> values;
    bool symmetric_path = false;
    /// Per-block values when evaluated under a quarantine partition.
    std::vector<std::vector<double>> block_values;
    double max_value() const;
};

enum class Verdict { CertifiedGes, CertifiedUnstableOrigin, Inconclusive };

std::string to_string(Verdict v);

struct StabilityCertificate {
    Verdict verdict = Verdict::Inconclusive;
    std::string condition;  // which condition fired (or was evaluated)
    std::map<std::string, double> scalars;
    double grid_start = 0.0, grid_end = 0.0;
    int grid_points = 0;
    std::string to_json() const;
};

std::vector<double> uniform_grid(double t0, double t1, int points);

SpectralTrace spectral_trace(const GraphTrajectory& traj, const VirusParams& params,
                             const std::vector<double>& grid);

/// Sufficient condition for GES of the DFE in the symmetric, homogeneous-beta
/// case: max over the grid of lambda_1(BA(t) - D) < 0.
StabilityCertificate check_theorem1(const GraphTrajectory& traj, const VirusParams& params,
                                    const std::vector<double>& grid);

/// Static graphs only: the origin is unstable when s_1(BA - D) > 0.
Verdict instability_flag(const SpectralTrace& trace, bool static_graph = true);

/// Row-sum sufficient check: beta * sup_t sum_j a_ij(t) - delta_i < 0 for
/// every i.
StabilityCertificate gershgorin_certificate(const GraphTrajectory& traj,
                                            const VirusParams& params,
                                            const std::vector<double>& grid);

/// Proximity-weight a priori bound: certified when n^2 - n < delta/beta.
Verdict remark2_check(int n, double beta, double delta);

struct Gamma1Estimate {
    double gamma1 = 0.0;     // sup_t ||Q(t)|| over the grid
    double argmax_time = 0.0;
    std::vector<double> q_norms;  // per grid point
};

/// Solves Q(t)(BA(t)-D) + (BA(t)-D)^T Q(t) = -I pointwise on the grid and
/// returns the sup of ||Q(t)||. Every grid point must be Hurwitz.
Gamma1Estimate gamma1_estimate(const GraphTrajectory& traj, const VirusParams& params,
                               const std::vector<double>& grid);

/// Solve the Lyapunov equation Q M + M^T Q = -I for a single Hurwitz M.
Matrix lyapunov_solve(const Matrix& m);

/// Slow-variation conditions: either sup_t ||B dA/dt(t) - D|| < 1/(2 gamma1^2)
/// or the windowed integral of ||B dA/dt(s) - D|| stays below mu T + alpha
/// with mu < gamma0 / (2 gamma1^3), gamma0 = 1/(2L). dA/dt is approximated by
/// central differences on the grid.
StabilityCertificate check_theorem2(const GraphTrajectory& traj, const VirusParams& params,
                                    const std::vector<double>& grid, double window,
                                    double alpha);

/// Runs check_theorem1 block by block under a quarantine partition; certified
/// overall iff every block certifies.
struct QuarantineCertificate {
    std::vector<StabilityCertificate> blocks;
    Verdict overall = Verdict::Inconclusive;
};
QuarantineCertificate quarantine_certificate(const GraphTrajectory& traj,
                                             const VirusParams& params,
                                             const QuarantinePolicy& policy,
                                             const std::vector<double>& grid);

/// check_theorem1 restricted to grid times >= t_start (eventual GES).
StabilityCertificate corollary1_shifted_check(const GraphTrajectory& traj,
                                              const VirusParams& params, double t_start,
                                              const std::vector<double>& grid);

}  // namespace sisnet
