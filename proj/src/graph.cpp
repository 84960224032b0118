#include "sisnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace sisnet {

Matrix static_topology(Topology kind, int n) {
    if (n < 2) throw InvalidInput("static_topology: need n >= 2, got " + std::to_string(n));
    Matrix a = Matrix::Zero(n, n);
    switch (kind) {
        case Topology::Line:
            for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
            break;
        case Topology::Star:
            for (int j = 1; j < n; ++j) a(0, j) = a(j, 0) = 1.0;
            break;
        case Topology::Complete:
            a.setOnes();
            a.diagonal().setZero();
            break;
    }
    return a;
}

void validate_weight_matrix(const Matrix& a) {
    if (a.rows() != a.cols()) throw InvalidInput("weight matrix must be square");
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (a(i, i) != 0.0) throw InvalidInput("weight matrix diagonal must be zero");
    }
    if ((a.array() < 0.0).any()) throw InvalidInput("weight matrix entries must be nonnegative");
}

Matrix proximity_weights(const Matrix& positions, double radius) {
    if (radius <= 0.0) throw InvalidInput("proximity_weights: radius must be positive");
    const int n = static_cast<int>(positions.rows());
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d2 = (positions.row(i) - positions.row(j)).squaredNorm();
            if (std::sqrt(d2) < radius) a(i, j) = a(j, i) = std::exp(-d2);
        }
    }
    return a;
}

void step_mobility(Matrix& positions, MobilityModel& model, double dt) {
    if (dt <= 0.0) throw InvalidInput("step_mobility: dt must be positive");
    if (positions.rows() != model.velocity.rows() || positions.cols() != model.velocity.cols())
        throw InvalidInput("step_mobility: positions/velocity shape mismatch");
    positions += model.velocity * dt;
    if (!model.reflecting) return;
    const double half = model.box_side / 2.0;
    for (Eigen::Index i = 0; i < positions.rows(); ++i) {
        for (Eigen::Index k = 0; k < positions.cols(); ++k) {
            const double lo = model.box_center(k) - half;
            const double hi = model.box_center(k) + half;
            double z = positions(i, k);
            // Mirror overshoot about the face; one pass suffices for dt small
            // relative to the box, loop covers large steps too.
            while (z < lo || z > hi) {
                if (z > hi) {
                    z = 2.0 * hi - z;
                    model.velocity(i, k) = -model.velocity(i, k);
                } else {
                    z = 2.0 * lo - z;
                    model.velocity(i, k) = -model.velocity(i, k);
                }
            }
            positions(i, k) = std::clamp(z, lo, hi);
        }
    }
}

int QuarantinePolicy::num_groups() const {
    int q = 0;
    for (int g : group) q = std::max(q, g + 1);
    return q;
}

Matrix apply_quarantine(const Matrix& a, const QuarantinePolicy& policy) {
    const int n = static_cast<int>(a.rows());
    if (static_cast<int>(policy.group.size()) != n)
        throw InvalidInput("apply_quarantine: partition size does not match agent count");
    for (int g : policy.group) {
        if (g < 0) throw InvalidInput("apply_quarantine: negative group index");
    }
    Matrix out = a;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (policy.group[i] != policy.group[j]) out(i, j) = 0.0;
    return out;
}

GraphTrajectory GraphTrajectory::constant(Matrix a) {
    validate_weight_matrix(a);
    GraphTrajectory t;
    t.n_ = static_cast<int>(a.rows());
    t.static_ = true;
    t.piecewise_ = true;
    t.symmetric_ = a.isApprox(a.transpose());
    auto shared = std::make_shared<Matrix>(std::move(a));
    t.sampler_ = [shared](double) { return *shared; };
    return t;
}

GraphTrajectory GraphTrajectory::piecewise(std::vector<double> times, std::vector<Matrix> mats) {
    if (times.empty() || times.size() != mats.size())
        throw InvalidInput("GraphTrajectory::piecewise: times/matrices mismatch");
    if (times.front() != 0.0) throw InvalidInput("GraphTrajectory::piecewise: must start at t = 0");
    if (!std::is_sorted(times.begin(), times.end()))
        throw InvalidInput("GraphTrajectory::piecewise: times must be increasing");
    bool sym = true;
    for (const Matrix& m : mats) {
        validate_weight_matrix(m);
        sym = sym && m.isApprox(m.transpose());
    }
    GraphTrajectory t;
    t.n_ = static_cast<int>(mats.front().rows());
    t.static_ = mats.size() == 1;
    t.piecewise_ = true;
    t.symmetric_ = sym;
    t.changes_.assign(times.begin() + 1, times.end());
    auto st = std::make_shared<std::vector<double>>(std::move(times));
    auto sm = std::make_shared<std::vector<Matrix>>(std::move(mats));
    t.sampler_ = [st, sm](double tt) {
        auto it = std::upper_bound(st->begin(), st->end(), tt);
        const auto idx = static_cast<size_t>(std::max<std::ptrdiff_t>(0, it - st->begin() - 1));
        return (*sm)[idx];
    };
    return t;
}

GraphTrajectory GraphTrajectory::from_function(std::function<Matrix(double)> f, int n,
                                               bool symmetric) {
    GraphTrajectory t;
    t.n_ = n;
    t.static_ = false;
    t.piecewise_ = false;
    t.symmetric_ = symmetric;
    t.sampler_ = std::move(f);
    return t;
}

Matrix GraphTrajectory::sample(double t) const {
    Matrix a = sampler_(t);
    validate_weight_matrix(a);
    return a;
}

}  // namespace sisnet
