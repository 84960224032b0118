#include "sisnet/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace sisnet {

namespace {

Matrix system_matrix(const Matrix& a, const VirusParams& params) {
    Matrix m = params.beta.asDiagonal() * a;
    m.diagonal() -= params.delta;
    return m;
}

bool is_symmetric(const Matrix& m, double tol = 1e-12) {
    return (m - m.transpose()).lpNorm<Eigen::Infinity>() <= tol;
}

double lambda1_symmetric(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolver failed");
    return es.eigenvalues().maxCoeff();
}

double spectral_abscissa(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m, false);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver failed");
    return es.eigenvalues().real().maxCoeff();
}

double spectral_value(const Matrix& m) {
    return is_symmetric(m) ? lambda1_symmetric(m) : spectral_abscissa(m);
}

double operator_norm(const Matrix& m) {
    return m.jacobiSvd().singularValues()(0);
}

std::vector<std::vector<int>> block_indices(const QuarantinePolicy& policy) {
    std::vector<std::vector<int>> blocks(policy.num_groups());
    for (std::size_t i = 0; i < policy.group.size(); ++i)
        blocks[policy.group[i]].push_back(static_cast<int>(i));
    return blocks;
}

Matrix submatrix(const Matrix& a, const std::vector<int>& idx) {
    Matrix s(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) s(i, j) = a(idx[i], idx[j]);
    return s;
}

void fill_grid_meta(StabilityCertificate& c, const std::vector<double>& grid) {
    c.grid_start = grid.front();
    c.grid_end = grid.back();
    c.grid_points = static_cast<int>(grid.size());
}

}  // namespace

double SpectralTrace::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) m = std::max(m, v);
    return m;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::CertifiedGes: return "certified-GES";
        case Verdict::CertifiedUnstableOrigin: return "certified-unstable-origin";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string StabilityCertificate::to_json() const {
    nlohmann::json j;
    j["verdict"] = to_string(verdict);
    j["condition"] = condition;
    j["scalars"] = scalars;
    j["grid"] = {{"start", grid_start}, {"end", grid_end}, {"points", grid_points}};
    return j.dump();
}

std::vector<double> uniform_grid(double t0, double t1, int points) {
    if (points < 1 || t1 < t0) throw InvalidInput("uniform_grid: bad arguments");
    std::vector<double> g(points);
    if (points == 1) {
        g[0] = t0;
        return g;
    }
    for (int i = 0; i < points; ++i)
        g[i] = t0 + (t1 - t0) * static_cast<double>(i) / (points - 1);
    return g;
}

SpectralTrace spectral_trace(const GraphTrajectory& traj, const VirusParams& params,
                             const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidInput("spectral_trace: empty grid");
    params.validate();
    SpectralTrace tr;
    tr.times = grid;
    tr.symmetric_path = true;
    for (double t : grid) {
        const Matrix m = system_matrix(traj.sample(t), params);
        const bool sym = is_symmetric(m);
        tr.symmetric_path = tr.symmetric_path && sym;
        tr.values.push_back(sym ? lambda1_symmetric(m) : spectral_abscissa(m));
    }
    return tr;
}

StabilityCertificate check_theorem1(const GraphTrajectory& traj, const VirusParams& params,
                                    const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidInput("check_theorem1: empty grid");
    params.validate();
    if (!params.homogeneous_beta())
        throw PreconditionViolated(
            "check_theorem1 requires homogeneous beta; use check_theorem2");
    double sup = -std::numeric_limits<double>::infinity();
    for (double t : grid) {
        const Matrix m = system_matrix(traj.sample(t), params);
        if (!is_symmetric(m))
            throw PreconditionViolated(
                "check_theorem1 requires symmetric A(t); use check_theorem2");
        sup = std::max(sup, lambda1_symmetric(m));
    }
    StabilityCertificate c;
    c.condition = "sup_t lambda1(BA(t)-D) < 0";
    c.scalars["sup_lambda1"] = sup;
    c.verdict = sup < 0.0 ? Verdict::CertifiedGes : Verdict::Inconclusive;
    fill_grid_meta(c, grid);
    return c;
}

Verdict instability_flag(const SpectralTrace& trace, bool static_graph) {
    if (!static_graph) return Verdict::Inconclusive;
    return trace.max_value() > 0.0 ? Verdict::CertifiedUnstableOrigin : Verdict::Inconclusive;
}

StabilityCertificate gershgorin_certificate(const GraphTrajectory& traj,
                                            const VirusParams& params,
                                            const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidInput("gershgorin_certificate: empty grid");
    params.validate();
    const int n = params.agents();
    Vector sup_row = Vector::Zero(n);
    for (double t : grid) {
        const Matrix a = traj.sample(t);
        for (int i = 0; i < n; ++i) sup_row(i) = std::max(sup_row(i), a.row(i).sum());
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, params.beta(i) * sup_row(i) - params.delta(i));
    StabilityCertificate c;
    c.condition = "beta_i sup_t sum_j a_ij(t) - delta_i < 0 for all i";
    c.scalars["worst_row_margin"] = worst;
    c.verdict = worst < 0.0 ? Verdict::CertifiedGes : Verdict::Inconclusive;
    fill_grid_meta(c, grid);
    return c;
}

Verdict remark2_check(int n, double beta, double delta) {
    if (n < 1 || beta < 0.0 || delta < 0.0) throw InvalidInput("remark2_check: bad arguments");
    if (beta == 0.0) return Verdict::CertifiedGes;
    return static_cast<double>(n) * n - n < delta / beta ? Verdict::CertifiedGes
                                                         : Verdict::Inconclusive;
}

Matrix lyapunov_solve(const Matrix& m) {
    const auto n = m.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix mt = m.transpose();
    // vec(Q M) = (M^T (x) I) vec(Q), vec(M^T Q) = (I (x) M^T) vec(Q)
    Matrix k = Eigen::kroneckerProduct(mt, id) + Eigen::kroneckerProduct(id, mt);
    Vector rhs(n * n);
    Eigen::Map<Matrix>(rhs.data(), n, n) = -id;
    Vector q = k.partialPivLu().solve(rhs);
    Matrix out = Eigen::Map<Matrix>(q.data(), n, n);
    return 0.5 * (out + out.transpose());
}

Gamma1Estimate gamma1_estimate(const GraphTrajectory& traj, const VirusParams& params,
                               const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidInput("gamma1_estimate: empty grid");
    params.validate();
    Gamma1Estimate est;
    for (double t : grid) {
        const Matrix m = system_matrix(traj.sample(t), params);
        if (spectral_abscissa(m) >= 0.0)
            throw PreconditionViolated("gamma1_estimate: BA(t)-D is not Hurwitz at t = " +
                                       std::to_string(t));
        const Matrix q = lyapunov_solve(m);
        const double norm = lambda1_symmetric(q);
        est.q_norms.push_back(norm);
        if (norm > est.gamma1) {
            est.gamma1 = norm;
            est.argmax_time = t;
        }
    }
    return est;
}

StabilityCertificate check_theorem2(const GraphTrajectory& traj, const VirusParams& params,
                                    const std::vector<double>& grid, double window,
                                    double alpha) {
    if (grid.size() < 3)
        throw InvalidInput("check_theorem2: grid too coarse for finite differencing");
    params.validate();
    const int n = params.agents();
    std::vector<Matrix> a(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) a[i] = traj.sample(grid[i]);

    double big_l = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        big_l = std::max(big_l, operator_norm(system_matrix(a[i], params)));
    const Gamma1Estimate g1 = gamma1_estimate(traj, params, grid);
    const double gamma0 = 1.0 / (2.0 * big_l);

    const Matrix d_mat = Matrix(params.delta.asDiagonal());
    std::vector<double> norm_dad(grid.size()), norm_da(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == grid.size() ? i : i + 1;
        const Matrix da = (a[hi] - a[lo]) / (grid[hi] - grid[lo]);
        const Matrix bda = params.beta.asDiagonal() * da;
        norm_dad[i] = operator_norm(bda - d_mat);
        norm_da[i] = operator_norm(bda);
    }
    const double sup_dad = *std::max_element(norm_dad.begin(), norm_dad.end());
    const double sup_da = *std::max_element(norm_da.begin(), norm_da.end());
    const double branch1_threshold = 1.0 / (2.0 * g1.gamma1 * g1.gamma1);

    // Sliding-window trapezoid integral of ||B dA/dt - D||.
    double mu_required = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t_end = grid[i] + window;
        if (t_end > grid.back() + 1e-12) break;
        double integral = 0.0;
        for (std::size_t j = i; j + 1 < grid.size() && grid[j] < t_end; ++j) {
            const double seg = std::min(grid[j + 1], t_end) - grid[j];
            integral += 0.5 * (norm_dad[j] + norm_dad[j + 1]) * seg;
        }
        mu_required = std::max(mu_required, (integral - alpha) / window);
    }
    const double mu_threshold = gamma0 / (2.0 * std::pow(g1.gamma1, 3));

    StabilityCertificate c;
    c.scalars["gamma1"] = g1.gamma1;
    c.scalars["gamma0"] = gamma0;
    c.scalars["L"] = big_l;
    c.scalars["sup_norm_BdA_minus_D"] = sup_dad;
    c.scalars["sup_norm_BdA"] = sup_da;
    c.scalars["branch1_threshold"] = branch1_threshold;
    c.scalars["mu_required"] = mu_required;
    c.scalars["mu_threshold"] = mu_threshold;
    c.scalars["alpha"] = alpha;
    c.scalars["window"] = window;
    (void)n;
    if (sup_dad < branch1_threshold) {
        c.verdict = Verdict::CertifiedGes;
        c.condition = "sup_t ||B dA/dt(t) - D|| < 1/(2 gamma1^2)";
    } else if (mu_required < mu_threshold) {
        c.verdict = Verdict::CertifiedGes;
        c.condition = "windowed integral of ||B dA/dt - D|| <= mu T + alpha, mu small";
    } else {
        c.verdict = Verdict::Inconclusive;
        c.condition = "neither slow-variation branch holds";
    }
    fill_grid_meta(c, grid);
    return c;
}

QuarantineCertificate quarantine_certificate(const GraphTrajectory& traj,
                                             const VirusParams& params,
                                             const QuarantinePolicy& policy,
                                             const std::vector<double>& grid) {
    if (static_cast<int>(policy.group.size()) != params.agents())
        throw InvalidInput("quarantine_certificate: partition size mismatch");
    QuarantineCertificate out;
    out.overall = Verdict::CertifiedGes;
    for (const auto& idx : block_indices(policy)) {
        if (idx.empty()) continue;
        VirusParams bp;
        bp.beta.resize(idx.size());
        bp.delta.resize(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            bp.beta(i) = params.beta(idx[i]);
            bp.delta(i) = params.delta(idx[i]);
        }
        GraphTrajectory block = GraphTrajectory::from_function(
            [&traj, &policy, idx](double t) {
                return submatrix(apply_quarantine(traj.sample(t), policy), idx);
            },
            static_cast<int>(idx.size()), traj.symmetric());
        StabilityCertificate c = check_theorem1(block, bp, grid);
        if (c.verdict != Verdict::CertifiedGes) out.overall = Verdict::Inconclusive;
        out.blocks.push_back(std::move(c));
    }
    return out;
}

StabilityCertificate corollary1_shifted_check(const GraphTrajectory& traj,
                                              const VirusParams& params, double t_start,
                                              const std::vector<double>& grid) {
    std::vector<double> shifted;
    for (double t : grid)
        if (t >= t_start) shifted.push_back(t);
    if (shifted.empty())
        throw InvalidInput("corollary1_shifted_check: no grid points at or after t_start");
    StabilityCertificate c = check_theorem1(traj, params, shifted);
    c.condition = "sup_{t >= T} lambda1(BA(t)-D) < 0, T = " + std::to_string(t_start);
    c.scalars["t_start"] = t_start;
    return c;
}

}  // namespace sisnet
