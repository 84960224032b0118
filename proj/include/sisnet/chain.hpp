#pragma once

#include <optional>
#include <vector>

#include "sisnet/graph.hpp"

namespace sisnet {

/// Conservative generator of the exact 2^n-state chain, stored as per-source
/// transition lists. State s (0-based) encodes the infection pattern with
/// agent i infected iff bit i of s is set.
struct SparseGenerator {
    int agents = 0;
    std::vector<std::int64_t> offsets;  // size 2^n + 1
    std::vector<std::int64_t> targets;
    std::vector<double> rates;
    std::vector<double> outflow;  // negated diagonal, size 2^n

    std::int64_t dim() const { return std::int64_t{1} << agents; }
    double max_outflow() const;
    /// dy = d/dt of the distribution: dy_l = sum_k y_k q_{k->l} - y_l * outflow_l.
    void apply(const Vector& y, Vector& dy) const;
};

/// Healing flips an infected bit at rate delta; infection flips a susceptible
/// bit i at rate beta * sum_j a_ij x_j. The all-healthy state is absorbing.
SparseGenerator build_generator(const Matrix& a, double beta, double delta, int size_cap = 14);

Vector point_mass_from_bits(const std::vector<int>& bits);
std::vector<int> bits_from_index(std::int64_t index, int n);

/// Per-agent marginal infection probabilities v_i = sum over states with
/// bit i set.
Vector marginals(const Vector& y, int n);

struct ChainOptions {
    double derivative_tol = 1e-12;
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int size_cap = 14;
    double poisson_tail = 1e-12;
    /// Max uniformization rate-time product per window.
    double max_window_mass = 128.0;
};

struct ChainTrajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::optional<double> early_stop_time;
    Vector marginals_at(std::size_t idx) const;
};

/// Transient solution of the chain sampled at the requested times (which must
/// be sorted, within [0, horizon]; the horizon itself is always appended if
/// missing). Piecewise-constant trajectories integrate each constant segment
/// by uniformization; smoothly varying samplers fall back to RK45.
ChainTrajectory integrate_chain(const Vector& y0, const GraphTrajectory& traj, double beta,
                                double delta, double horizon,
                                const std::vector<double>& sample_times,
                                const ChainOptions& opts = {});

}  // namespace sisnet
