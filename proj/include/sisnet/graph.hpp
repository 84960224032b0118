#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sisnet/errors.hpp"

namespace sisnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Topology { Line, Star, Complete };

/// Binary symmetric adjacency matrix with zero diagonal. For the star graph
/// the hub is agent 0.
Matrix static_topology(Topology kind, int n);

/// Checks the weight-matrix invariants: square, zero diagonal, nonnegative
/// entries; throws InvalidInput on violation.
void validate_weight_matrix(const Matrix& a);

/// Distance-decay weights a_ij = exp(-||z_i - z_j||^2) for pairs strictly
/// closer than `radius`, 0 otherwise. `positions` is n x d.
Matrix proximity_weights(const Matrix& positions, double radius);

/// Agent motion: every agent moves with its own constant velocity; with a
/// confinement box, a coordinate that crosses a face is mirrored about it and
/// that velocity component flips sign for subsequent steps.
struct MobilityModel {
    Matrix velocity;  // n x d
    bool reflecting = false;
    Vector box_center;  // d, used when reflecting
    double box_side = 0.0;
};

/// Advances positions (n x d) by one step of size dt, mutating the model's
/// velocities on reflection.
void step_mobility(Matrix& positions, MobilityModel& model, double dt);

struct QuarantinePolicy {
    struct Box {
        Vector center;
        double side = 0.0;
    };
    int activation_step = 0;
    std::vector<int> group;                 // group index per agent
    std::vector<std::optional<Box>> regions;  // confinement box per group
    int num_groups() const;
};

/// Zeroes every cross-group weight; within-group weights are untouched.
Matrix apply_quarantine(const Matrix& a, const QuarantinePolicy& policy);

/// Time-indexed weight matrix A(t). Immutable after construction; every
/// sample is validated against the weight-matrix invariants.
class GraphTrajectory {
public:
    static GraphTrajectory constant(Matrix a);

    /// Piecewise-constant trajectory: A(t) = mats[i] on [times[i], times[i+1]),
    /// with times[0] == 0 and the last matrix held forever.
    static GraphTrajectory piecewise(std::vector<double> times, std::vector<Matrix> mats);

    /// Arbitrary sampler (assumed continuous in t); integrators fall back to
    /// generic stepping for these.
    static GraphTrajectory from_function(std::function<Matrix(double)> f, int n,
                                         bool symmetric = true);

    Matrix sample(double t) const;
    int agents() const { return n_; }
    bool is_static() const { return static_; }
    bool symmetric() const { return symmetric_; }
    bool piecewise_constant() const { return piecewise_; }
    /// Interior instants where a piecewise trajectory switches matrices.
    const std::vector<double>& change_times() const { return changes_; }
    double radius() const { return radius_; }
    void set_radius(double r) { radius_ = r; }

private:
    GraphTrajectory() = default;
    int n_ = 0;
    bool static_ = false;
    bool symmetric_ = false;
    bool piecewise_ = false;
    double radius_ = 0.0;
    std::vector<double> changes_;
    std::function<Matrix(double)> sampler_;
};

}  // namespace sisnet
