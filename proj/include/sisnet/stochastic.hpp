#pragma once

#include <cstdint>
#include <vector>

#include "sisnet/graph.hpp"
#include "sisnet/meanfield.hpp"

namespace sisnet {

enum class NoiseLaw { Gaussian, Uniform, Rademacher };

/// Additive perturbation of the mean-field model. Generic: p' = F(t,p) +
/// g(t,p) xi with g_i = k_i p_i^2 and xi redrawn i.i.d. each dt_noise.
/// Ito: dp = F(t,p) dt + g(t,p) dw with g_i = k_i p_i, one Wiener channel per
/// agent.
struct NoiseSpec {
    enum class Kind { Generic, Ito } kind = Kind::Ito;
    Vector gains;  // k_i >= 0 per agent
    NoiseLaw law = NoiseLaw::Gaussian;
    double law_mean = 0.0;  // must be zero; kept so a bad spec is detectable
    double dt = 1e-2;       // integration step
    double dt_noise = 0.0;  // generic only; 0 = redraw every step
    std::uint64_t seed = 0;
};

struct EnsembleResult {
    std::vector<double> times;
    std::vector<Vector> mean_path;  // ensemble mean at each time
    Matrix final_states;            // paths x n
    std::uint64_t seed = 0;
    std::size_t clamped_steps = 0;  // total across paths, after retries
    std::size_t total_steps = 0;
};

EnsembleResult simulate_generic_noise(const Vector& p0, const GraphTrajectory& traj,
                                      const VirusParams& params, const NoiseSpec& noise,
                                      double horizon, int paths,
                                      const std::vector<double>& sample_times);

EnsembleResult simulate_ito(const Vector& p0, const GraphTrajectory& traj,
                            const VirusParams& params, const NoiseSpec& noise, double horizon,
                            int paths, const std::vector<double>& sample_times);

/// Fraction of paths whose final state satisfies ||p(T)||_inf < threshold.
double almost_sure_convergence_check(const EnsembleResult& result, double threshold);

}  // namespace sisnet
