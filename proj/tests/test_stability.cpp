#include <doctest.h>

#include <cmath>
#include <random>

#include "sisnet/stability.hpp"

using namespace sisnet;

namespace {

GraphTrajectory empty_traj(int n) {
    return GraphTrajectory::constant(Matrix::Zero(n, n));
}

}  // namespace

TEST_CASE("spectral trace: diagonal, complete, and line cases") {
    VirusParams params;
    params.beta = Vector::Ones(3);
    params.delta.resize(3);
    params.delta << 0.4, 0.9, 0.6;
    auto tr = spectral_trace(empty_traj(3), params, {0.0});
    CHECK(tr.values[0] == doctest::Approx(-0.4).epsilon(1e-12));

    auto complete = GraphTrajectory::constant(static_topology(Topology::Complete, 6));
    auto p2 = VirusParams::homogeneous(6, 0.3, 0.7);
    tr = spectral_trace(complete, p2, {0.0, 1.0});
    CHECK(tr.values[0] == doctest::Approx(0.3 * 5.0 - 0.7).epsilon(1e-12));

    auto line = GraphTrajectory::constant(static_topology(Topology::Line, 3));
    auto p3 = VirusParams::homogeneous(3, 1.0, 0.0);
    tr = spectral_trace(line, p3, {0.0});
    CHECK(tr.values[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("symmetric eigenvalue and spectral abscissa agree on symmetric inputs") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix a = Matrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) a(i, j) = a(j, i) = u(rng);
    auto traj = GraphTrajectory::constant(a);
    auto params = VirusParams::homogeneous(5, 0.8, 0.5);
    auto sym = spectral_trace(traj, params, {0.0});
    // Force the general path by marking the trajectory nonsymmetric.
    auto gen_traj = GraphTrajectory::from_function([a](double) { return a; }, 5, false);
    auto gen = spectral_trace(gen_traj, params, {0.0});
    CHECK(sym.values[0] == doctest::Approx(gen.values[0]).epsilon(1e-10));
}

TEST_CASE("theorem 1: subcritical certifies, supercritical does not") {
    auto complete = GraphTrajectory::constant(static_topology(Topology::Complete, 6));
    auto grid = uniform_grid(0.0, 1.0, 3);

    auto cert = check_theorem1(complete, VirusParams::homogeneous(6, 0.1, 1.0), grid);
    CHECK(cert.verdict == Verdict::CertifiedGes);
    CHECK(cert.scalars.at("sup_lambda1") == doctest::Approx(-0.5).epsilon(1e-12));

    cert = check_theorem1(complete, VirusParams::homogeneous(6, 1.0, 0.1), grid);
    CHECK(cert.verdict != Verdict::CertifiedGes);

    cert = check_theorem1(empty_traj(4), VirusParams::homogeneous(4, 1.0, 0.3), grid);
    CHECK(cert.verdict == Verdict::CertifiedGes);
}

TEST_CASE("theorem 1 preconditions route to theorem 2") {
    auto complete = GraphTrajectory::constant(static_topology(Topology::Complete, 3));
    VirusParams het;
    het.beta.resize(3);
    het.beta << 0.1, 0.2, 0.3;
    het.delta = Vector::Ones(3);
    CHECK_THROWS_AS(check_theorem1(complete, het, uniform_grid(0.0, 1.0, 3)),
                    PreconditionViolated);
}

TEST_CASE("instability flag follows Lemma 8") {
    auto complete = GraphTrajectory::constant(static_topology(Topology::Complete, 6));
    auto grid = uniform_grid(0.0, 1.0, 3);

    auto super = spectral_trace(complete, VirusParams::homogeneous(6, 1.0, 0.1), grid);
    CHECK(instability_flag(super, true) == Verdict::CertifiedUnstableOrigin);

    auto sub = spectral_trace(complete, VirusParams::homogeneous(6, 0.1, 1.0), grid);
    CHECK(instability_flag(sub, true) == Verdict::Inconclusive);

    // Lemma is stated for static graphs only; withhold on time-varying traces.
    CHECK(instability_flag(super, false) == Verdict::Inconclusive);
}

TEST_CASE("Gershgorin row-sum certificate") {
    auto grid = uniform_grid(0.0, 1.0, 3);
    auto cert = gershgorin_certificate(empty_traj(3), VirusParams::homogeneous(3, 1.0, 0.2), grid);
    CHECK(cert.verdict == Verdict::CertifiedGes);

    auto complete = GraphTrajectory::constant(static_topology(Topology::Complete, 6));
    cert = gershgorin_certificate(complete, VirusParams::homogeneous(6, 0.1, 1.0), grid);
    CHECK(cert.verdict == Verdict::CertifiedGes);
    CHECK(cert.scalars.at("worst_row_margin") == doctest::Approx(-0.5).epsilon(1e-12));

    cert = gershgorin_certificate(complete, VirusParams::homogeneous(6, 1.0, 1.0), grid);
    CHECK(cert.verdict == Verdict::Inconclusive);
}

TEST_CASE("proximity a priori bound") {
    CHECK(remark2_check(2, 1.0, 3.0) == Verdict::CertifiedGes);
    CHECK(remark2_check(6, 1.0, 10.0) == Verdict::Inconclusive);
    CHECK(remark2_check(50, 0.0, 1.0) == Verdict::CertifiedGes);
}

TEST_CASE("Lyapunov solutions: closed forms and residuals") {
    Matrix m = Matrix::Constant(1, 1, -0.7);
    Matrix q = lyapunov_solve(m);
    CHECK(q(0, 0) == doctest::Approx(1.0 / 1.4).epsilon(1e-12));

    q = lyapunov_solve(-Matrix::Identity(4, 4));
    CHECK((q - 0.5 * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        Matrix r(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r(i, j) = u(rng) - 0.5;
        Matrix hurwitz = r - 5.0 * Matrix::Identity(4, 4);
        Matrix sol = lyapunov_solve(hurwitz);
        Matrix residual = sol * hurwitz + hurwitz.transpose() * sol + Matrix::Identity(4, 4);
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("gamma1 estimate: scalar and time-varying cases") {
    auto params1 = VirusParams::homogeneous(1, 0.0, 0.9);
    auto est = gamma1_estimate(empty_traj(1), params1, {0.0});
    CHECK(est.gamma1 == doctest::Approx(1.0 / 1.8).epsilon(1e-12));

    // Scalar rate delta(t) = 1 + sin^2 t: sup ||Q|| = 1/2 at sin t = 0.
    auto traj = GraphTrajectory::from_function([](double) { return Matrix::Zero(1, 1); }, 1);
    auto grid = uniform_grid(0.0, 3.2, 321);
    std::vector<double> qs;
    double sup = 0.0;
    for (double t : grid) {
        VirusParams p;
        p.beta = Vector::Zero(1);
        p.delta = Vector::Constant(1, 1.0 + std::sin(t) * std::sin(t));
        sup = std::max(sup, gamma1_estimate(traj, p, {t}).gamma1);
    }
    CHECK(sup == doctest::Approx(0.5).epsilon(1e-6));

    // Non-Hurwitz grid point names the offending time.
    auto complete = GraphTrajectory::constant(static_topology(Topology::Complete, 4));
    CHECK_THROWS_AS(gamma1_estimate(complete, VirusParams::homogeneous(4, 1.0, 0.1), {0.0}),
                    PreconditionViolated);
}

TEST_CASE("gamma1 never drops below the coarse bound 1/(2L)") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        Matrix a = Matrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) a(i, j) = a(j, i) = 0.2 * u(rng);
        auto traj = GraphTrajectory::constant(a);
        auto params = VirusParams::homogeneous(4, 0.1, 1.0 + u(rng));
        auto grid = uniform_grid(0.0, 1.0, 3);
        auto est = gamma1_estimate(traj, params, grid);
        Matrix m = params.beta.asDiagonal() * a;
        m -= Matrix(params.delta.asDiagonal());
        const double big_l = m.jacobiSvd().singularValues()(0);
        CHECK(est.gamma1 >= 1.0 / (2.0 * big_l) - 1e-12);
    }
}

TEST_CASE("theorem 2: slowly varying certifies, fast switching does not") {
    // Static scalar system: dA/dt = 0, condition reduces to ||D|| < 1/(2 gamma1^2).
    auto traj = GraphTrajectory::from_function([](double) { return Matrix::Zero(1, 1); }, 1);
    auto params = VirusParams::homogeneous(1, 0.0, 0.9);
    auto grid = uniform_grid(0.0, 2.0, 41);
    auto cert = check_theorem2(traj, params, grid, 0.5, 0.0);
    // gamma1 = 1/(2*0.9); ||D|| = 0.9 < 1/(2 gamma1^2) = 1.62.
    CHECK(cert.verdict == Verdict::CertifiedGes);
    CHECK(cert.scalars.at("gamma1") == doctest::Approx(1.0 / 1.8).epsilon(1e-9));

    // Rapid oscillation: Hurwitz pointwise but huge ||B dA/dt||.
    auto fast = GraphTrajectory::from_function(
        [](double t) {
            Matrix a = Matrix::Zero(2, 2);
            a(0, 1) = a(1, 0) = 0.5 + 0.5 * std::sin(40.0 * t);
            return a;
        },
        2);
    auto p2 = VirusParams::homogeneous(2, 0.5, 2.0);
    cert = check_theorem2(fast, p2, uniform_grid(0.0, 2.0, 401), 0.5, 0.0);
    CHECK(cert.verdict == Verdict::Inconclusive);

    CHECK_THROWS_AS(check_theorem2(traj, params, {0.0, 1.0}, 0.5, 0.0), InvalidInput);
}

TEST_CASE("quarantine certificate: per-block verdicts") {
    Matrix a = Matrix::Zero(5, 5);
    a.topLeftCorner(3, 3) = static_topology(Topology::Complete, 3);
    a.bottomRightCorner(2, 2) = static_topology(Topology::Complete, 2);
    auto traj = GraphTrajectory::constant(a);
    QuarantinePolicy policy;
    policy.group = {0, 0, 0, 1, 1};
    policy.regions = {std::nullopt, std::nullopt};
    auto grid = uniform_grid(0.0, 1.0, 3);

    auto qc = quarantine_certificate(traj, VirusParams::homogeneous(5, 0.1, 1.0), policy, grid);
    CHECK(qc.overall == Verdict::CertifiedGes);
    REQUIRE(qc.blocks.size() == 2);
    CHECK(qc.blocks[0].verdict == Verdict::CertifiedGes);

    // First block supercritical: beta * 2 - 0.1 > 0.
    qc = quarantine_certificate(traj, VirusParams::homogeneous(5, 1.0, 0.1), policy, grid);
    CHECK(qc.overall != Verdict::CertifiedGes);
    CHECK(qc.blocks[0].verdict != Verdict::CertifiedGes);

    // Singleton blocks see empty subgraphs.
    QuarantinePolicy singles;
    singles.group = {0, 1, 2, 3, 4};
    singles.regions.assign(5, std::nullopt);
    qc = quarantine_certificate(traj, VirusParams::homogeneous(5, 1.0, 0.1), singles, grid);
    CHECK(qc.overall == Verdict::CertifiedGes);
}

TEST_CASE("block-diagonal spectral trace equals the max over per-block traces") {
    Matrix a = Matrix::Zero(5, 5);
    a.topLeftCorner(3, 3) = static_topology(Topology::Star, 3);
    a.bottomRightCorner(2, 2) = static_topology(Topology::Complete, 2);
    auto params = VirusParams::homogeneous(5, 0.7, 0.4);
    auto grid = uniform_grid(0.0, 1.0, 2);
    auto whole = spectral_trace(GraphTrajectory::constant(a), params, grid);
    auto b1 = spectral_trace(GraphTrajectory::constant(Matrix(a.topLeftCorner(3, 3))),
                             VirusParams::homogeneous(3, 0.7, 0.4), grid);
    auto b2 = spectral_trace(GraphTrajectory::constant(Matrix(a.bottomRightCorner(2, 2))),
                             VirusParams::homogeneous(2, 0.7, 0.4), grid);
    for (std::size_t s = 0; s < grid.size(); ++s)
        CHECK(whole.values[s] ==
              doctest::Approx(std::max(b1.values[s], b2.values[s])).epsilon(1e-10));
}

TEST_CASE("shifted certificate for eventual stability") {
    // Piecewise: supercritical until t = 2, empty afterwards.
    Matrix a0 = static_topology(Topology::Complete, 3);
    auto traj = GraphTrajectory::piecewise({0.0, 2.0}, {a0, Matrix::Zero(3, 3)});
    auto params = VirusParams::homogeneous(3, 1.0, 0.5);
    auto grid = uniform_grid(0.0, 10.0, 101);

    auto full = corollary1_shifted_check(traj, params, 0.0, grid);
    CHECK(full.verdict != Verdict::CertifiedGes);

    auto shifted = corollary1_shifted_check(traj, params, 2.0, grid);
    CHECK(shifted.verdict == Verdict::CertifiedGes);

    auto same = check_theorem1(traj, params, grid);
    CHECK(full.verdict == same.verdict);

    auto super = GraphTrajectory::constant(a0);
    CHECK(corollary1_shifted_check(super, params, 5.0, grid).verdict != Verdict::CertifiedGes);
}
