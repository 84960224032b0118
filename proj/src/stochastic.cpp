#include "sisnet/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "sisnet/detail/rng.hpp"

namespace sisnet {

namespace {

struct PathResult {
    std::vector<Vector> at_wanted;
    Vector final_state;
    std::size_t clamped = 0;
    std::size_t steps = 0;
};

double draw(NoiseLaw law, std::mt19937_64& rng) {
    switch (law) {
        case NoiseLaw::Gaussian: {
            std::normal_distribution<double> d(0.0, 1.0);
            return d(rng);
        }
        case NoiseLaw::Uniform: {
            // zero mean, unit variance
            std::uniform_real_distribution<double> d(-std::sqrt(3.0), std::sqrt(3.0));
            return d(rng);
        }
        case NoiseLaw::Rademacher: {
            std::bernoulli_distribution d(0.5);
            return d(rng) ? 1.0 : -1.0;
        }
    }
    return 0.0;
}

void validate_noise(const NoiseSpec& noise, int n) {
    if (noise.gains.size() != n) throw InvalidInput("noise: gains size does not match agent count");
    if (noise.gains.minCoeff() < 0.0) throw InvalidInput("noise: gains must be nonnegative");
    if (noise.law_mean != 0.0)
        throw InvalidInput("noise: distribution must have zero mean");
    if (noise.dt <= 0.0) throw InvalidInput("noise: dt must be positive");
}

// One Euler path; returns states at the wanted times (first grid instant
// reaching each).
PathResult run_path(const Vector& p0, const GraphTrajectory& traj, const VirusParams& params,
                    const NoiseSpec& noise, double horizon, const std::vector<double>& wanted,
                    std::uint64_t path_seed, double dt) {
    std::mt19937_64 rng(path_seed);
    const int n = static_cast<int>(p0.size());
    const bool generic = noise.kind == NoiseSpec::Kind::Generic;
    const double dt_noise = (generic && noise.dt_noise > 0.0) ? noise.dt_noise : dt;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));
    const bool resample_graph = !traj.is_static();
    Matrix a = traj.sample(0.0);

    PathResult res;
    Vector p = p0;
    Vector xi = Vector::Zero(n);
    double next_redraw = 0.0;
    std::size_t next_wanted = 0;
    const double sqdt = std::sqrt(dt);
    double t = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        while (next_wanted < wanted.size() && t >= wanted[next_wanted] - 1e-12) {
            res.at_wanted.push_back(p);
            ++next_wanted;
        }
        if (resample_graph) a = traj.sample(t);
        Vector f = mf_rhs(p, a, params);
        if (generic) {
            if (t >= next_redraw - 1e-12) {
                for (int i = 0; i < n; ++i) xi(i) = draw(noise.law, rng);
                next_redraw = t + dt_noise;
            }
            for (int i = 0; i < n; ++i)
                p(i) += dt * (f(i) + noise.gains(i) * p(i) * p(i) * xi(i));
        } else {
            for (int i = 0; i < n; ++i)
                p(i) += dt * f(i) + sqdt * noise.gains(i) * p(i) * draw(noise.law, rng);
        }
        bool hit = false;
        for (int i = 0; i < n; ++i) {
            if (p(i) < 0.0 || p(i) > 1.0) {
                p(i) = std::clamp(p(i), 0.0, 1.0);
                hit = true;
            }
        }
        if (hit) ++res.clamped;
        t = std::min(horizon, t + dt);
    }
    while (next_wanted < wanted.size()) {
        res.at_wanted.push_back(p);
        ++next_wanted;
    }
    res.final_state = p;
    res.steps = steps;
    return res;
}

EnsembleResult simulate(const Vector& p0, const GraphTrajectory& traj, const VirusParams& params,
                        const NoiseSpec& noise, double horizon, int paths,
                        const std::vector<double>& sample_times) {
    if (paths <= 0) throw InvalidInput("simulate: need at least one path");
    if (horizon <= 0.0) throw InvalidInput("simulate: horizon must be positive");
    params.validate();
    validate_noise(noise, static_cast<int>(p0.size()));
    if (p0.minCoeff() < 0.0 || p0.maxCoeff() > 1.0)
        throw InvalidInput("simulate: p0 must lie in [0,1]^n");

    std::set<double> wset(sample_times.begin(), sample_times.end());
    wset.insert(horizon);
    std::vector<double> wanted(wset.begin(), wset.end());

    if (noise.gains.maxCoeff() == 0.0) {
        // No diffusion: every path is the deterministic solution.
        MfTrajectory mf = integrate_mf(p0, traj, params, horizon, wanted);
        EnsembleResult out;
        out.seed = noise.seed;
        out.times = wanted;
        Vector final_state = p0;
        for (double w : wanted) {
            auto it = std::lower_bound(mf.times.begin(), mf.times.end(), w - 1e-12);
            const auto idx = static_cast<std::size_t>(it - mf.times.begin());
            const Vector& st = mf.states.at(std::min(idx, mf.states.size() - 1));
            out.mean_path.push_back(st);
            if (w == wanted.back()) final_state = st;
        }
        out.final_states.resize(paths, p0.size());
        for (int path = 0; path < paths; ++path) out.final_states.row(path) = final_state;
        return out;
    }

    EnsembleResult out;
    out.seed = noise.seed;
    out.times = wanted;
    out.mean_path.assign(wanted.size(), Vector::Zero(p0.size()));
    out.final_states.resize(paths, p0.size());
    for (int path = 0; path < paths; ++path) {
        const std::uint64_t ps = detail::derive_seed(noise.seed, static_cast<std::uint64_t>(path));
        double dt = noise.dt;
        PathResult res;
        // Step-size halving when clamping exceeds 1% of steps.
        for (int attempt = 0; attempt < 7; ++attempt) {
            res = run_path(p0, traj, params, noise, horizon, wanted, ps, dt);
            if (res.clamped <= res.steps / 100) break;
            dt /= 2.0;
        }
        for (std::size_t w = 0; w < wanted.size(); ++w) out.mean_path[w] += res.at_wanted[w];
        out.final_states.row(path) = res.final_state;
        out.clamped_steps += res.clamped;
        out.total_steps += res.steps;
    }
    for (auto& m : out.mean_path) m /= static_cast<double>(paths);
    return out;
}

}  // namespace

EnsembleResult simulate_generic_noise(const Vector& p0, const GraphTrajectory& traj,
                                      const VirusParams& params, const NoiseSpec& noise,
                                      double horizon, int paths,
                                      const std::vector<double>& sample_times) {
    NoiseSpec spec = noise;
    spec.kind = NoiseSpec::Kind::Generic;
    return simulate(p0, traj, params, spec, horizon, paths, sample_times);
}

EnsembleResult simulate_ito(const Vector& p0, const GraphTrajectory& traj,
                            const VirusParams& params, const NoiseSpec& noise, double horizon,
                            int paths, const std::vector<double>& sample_times) {
    NoiseSpec spec = noise;
    spec.kind = NoiseSpec::Kind::Ito;
    return simulate(p0, traj, params, spec, horizon, paths, sample_times);
}

double almost_sure_convergence_check(const EnsembleResult& result, double threshold) {
    if (result.final_states.rows() == 0) throw InvalidInput("convergence check: empty ensemble");
    int hits = 0;
    for (Eigen::Index r = 0; r < result.final_states.rows(); ++r)
        if (result.final_states.row(r).lpNorm<Eigen::Infinity>() < threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(result.final_states.rows());
}

}  // namespace sisnet
