#include "sisnet/chain.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sisnet/detail/rk45.hpp"

namespace sisnet {

double SparseGenerator::max_outflow() const {
    double m = 0.0;
    for (double o : outflow) m = std::max(m, o);
    return m;
}

void SparseGenerator::apply(const Vector& y, Vector& dy) const {
    const std::int64_t d = dim();
    dy.setZero(d);
    for (std::int64_t s = 0; s < d; ++s) {
        const double ys = y(s);
        if (ys == 0.0) continue;
        dy(s) -= ys * outflow[s];
        for (std::int64_t e = offsets[s]; e < offsets[s + 1]; ++e)
            dy(targets[e]) += ys * rates[e];
    }
}

SparseGenerator build_generator(const Matrix& a, double beta, double delta, int size_cap) {
    validate_weight_matrix(a);
    if (beta < 0.0 || delta < 0.0) throw InvalidInput("build_generator: rates must be nonnegative");
    const int n = static_cast<int>(a.rows());
    if (n > size_cap)
        throw InvalidInput("build_generator: n = " + std::to_string(n) + " exceeds size cap " +
                           std::to_string(size_cap));
    SparseGenerator g;
    g.agents = n;
    const std::int64_t d = g.dim();
    g.offsets.resize(d + 1);
    g.outflow.assign(d, 0.0);
    g.targets.reserve(static_cast<std::size_t>(d) * n / 2);
    g.rates.reserve(static_cast<std::size_t>(d) * n / 2);
    for (std::int64_t s = 0; s < d; ++s) {
        g.offsets[s] = static_cast<std::int64_t>(g.targets.size());
        double out = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::int64_t bit = std::int64_t{1} << i;
            if (s & bit) {
                if (delta > 0.0) {
                    g.targets.push_back(s & ~bit);
                    g.rates.push_back(delta);
                    out += delta;
                }
            } else {
                double rate = 0.0;
                for (int j = 0; j < n; ++j)
                    if (s & (std::int64_t{1} << j)) rate += a(i, j);
                rate *= beta;
                if (rate > 0.0) {
                    g.targets.push_back(s | bit);
                    g.rates.push_back(rate);
                    out += rate;
                }
            }
        }
        g.outflow[s] = out;
    }
    g.offsets[d] = static_cast<std::int64_t>(g.targets.size());
    return g;
}

Vector point_mass_from_bits(const std::vector<int>& bits) {
    const int n = static_cast<int>(bits.size());
    if (n < 1 || n > 62) throw InvalidInput("point_mass_from_bits: bad dimension");
    std::int64_t s = 0;
    for (int i = 0; i < n; ++i) {
        if (bits[i] != 0 && bits[i] != 1) throw InvalidInput("point_mass_from_bits: bits must be 0/1");
        if (bits[i]) s |= std::int64_t{1} << i;
    }
    Vector y = Vector::Zero(std::int64_t{1} << n);
    y(s) = 1.0;
    return y;
}

std::vector<int> bits_from_index(std::int64_t index, int n) {
    std::vector<int> bits(n);
    for (int i = 0; i < n; ++i) bits[i] = static_cast<int>((index >> i) & 1);
    return bits;
}

Vector marginals(const Vector& y, int n) {
    const std::int64_t d = std::int64_t{1} << n;
    if (y.size() != d) throw InvalidInput("marginals: distribution size is not 2^n");
    Vector v = Vector::Zero(n);
    for (std::int64_t s = 0; s < d; ++s) {
        const double ys = y(s);
        if (ys == 0.0) continue;
        for (int i = 0; i < n; ++i)
            if (s & (std::int64_t{1} << i)) v(i) += ys;
    }
    return v;
}

Vector ChainTrajectory::marginals_at(std::size_t idx) const {
    const auto& y = states.at(idx);
    int n = 0;
    while ((std::int64_t{1} << n) < y.size()) ++n;
    return marginals(y, n);
}

namespace {

// One application of the uniformized transition matrix P = I + Q/lambda.
void apply_uniformized(const SparseGenerator& g, double lambda, const Vector& z, Vector& zn) {
    const std::int64_t d = g.dim();
    zn.setZero(d);
    for (std::int64_t s = 0; s < d; ++s) {
        const double zs = z(s);
        if (zs == 0.0) continue;
        zn(s) += zs * (1.0 - g.outflow[s] / lambda);
        for (std::int64_t e = g.offsets[s]; e < g.offsets[s + 1]; ++e)
            zn(g.targets[e]) += zs * g.rates[e] / lambda;
    }
}

// Advance y by dt under a fixed generator. Poisson weights are truncated at
// the tail tolerance and renormalized, so mass is conserved exactly.
void uniformize_advance(const SparseGenerator& g, double lambda, Vector& y, double dt,
                        double tail) {
    const double a = lambda * dt;
    if (a <= 0.0) return;
    std::vector<double> w;
    double wm = std::exp(-a), cum = wm;
    w.push_back(wm);
    while (cum < 1.0 - tail) {
        wm *= a / static_cast<double>(w.size());
        w.push_back(wm);
        cum += wm;
    }
    Vector acc = (w[0] / cum) * y;
    Vector z = y, zn(y.size());
    for (std::size_t m = 1; m < w.size(); ++m) {
        apply_uniformized(g, lambda, z, zn);
        z.swap(zn);
        acc += (w[m] / cum) * z;
    }
    y = std::move(acc);
}

void check_distribution(const Vector& y, double t) {
    const double sum = y.sum();
    if (std::abs(sum - 1.0) > 1e-7)
        throw NumericalFailure("chain distribution left the simplex at t = " + std::to_string(t) +
                               " (sum = " + std::to_string(sum) + ")");
    if (y.minCoeff() < -1e-9)
        throw NumericalFailure("chain distribution went negative at t = " + std::to_string(t) +
                               " (min = " + std::to_string(y.minCoeff()) + ")");
}

Vector clamped(const Vector& y) {
    return y.cwiseMax(0.0);
}

}  // namespace

ChainTrajectory integrate_chain(const Vector& y0, const GraphTrajectory& traj, double beta,
                                double delta, double horizon,
                                const std::vector<double>& sample_times,
                                const ChainOptions& opts) {
    if (horizon <= 0.0) throw InvalidInput("integrate_chain: horizon must be positive");
    const int n = traj.agents();
    if (y0.size() != (std::int64_t{1} << n))
        throw InvalidInput("integrate_chain: y0 size does not match 2^n");
    if (std::abs(y0.sum() - 1.0) > 1e-9 || y0.minCoeff() < 0.0)
        throw InvalidInput("integrate_chain: y0 is not on the probability simplex");

    // Knot sequence: requested samples plus graph-change instants plus horizon.
    std::set<double> knots(sample_times.begin(), sample_times.end());
    knots.insert(horizon);
    for (double c : traj.change_times())
        if (c > 0.0 && c < horizon) knots.insert(c);
    knots.erase(0.0);
    std::set<double> wanted(sample_times.begin(), sample_times.end());
    wanted.insert(horizon);

    ChainTrajectory out;
    Vector y = y0;
    double t = 0.0;
    if (wanted.count(0.0)) {
        out.times.push_back(0.0);
        out.states.push_back(clamped(y));
    }

    const auto& changes = traj.change_times();
    auto next_change_after = [&](double tt) {
        auto it = std::upper_bound(changes.begin(), changes.end(), tt);
        return it == changes.end() ? horizon : std::min(*it, horizon);
    };

    if (traj.piecewise_constant()) {
        SparseGenerator gen = build_generator(traj.sample(0.0), beta, delta, opts.size_cap);
        double lambda = gen.max_outflow();
        double segment_end = next_change_after(0.0);
        bool held = false;
        Vector dy(y.size());
        for (double knot : knots) {
            if (knot > horizon) break;
            while (t < knot) {
                if (held) {
                    t = knot;
                    break;
                }
                if (t >= segment_end) {
                    gen = build_generator(traj.sample(t), beta, delta, opts.size_cap);
                    lambda = gen.max_outflow();
                    segment_end = next_change_after(t);
                }
                const double stop = std::min(knot, segment_end);
                double window = stop - t;
                if (lambda > 0.0) window = std::min(window, opts.max_window_mass / lambda);
                uniformize_advance(gen, lambda, y, window, opts.poisson_tail);
                t += window;
                gen.apply(y, dy);
                if (dy.lpNorm<Eigen::Infinity>() < opts.derivative_tol) {
                    if (segment_end >= horizon) {
                        out.early_stop_time = t;
                        held = true;
                    } else {
                        t = std::min(knot, segment_end);  // hold to end of segment
                    }
                }
            }
            if (wanted.count(knot)) {
                check_distribution(y, knot);
                out.times.push_back(knot);
                out.states.push_back(clamped(y));
            }
            t = knot;
        }
        return out;
    }

    // Smoothly varying sampler: generic adaptive stepping, generator rebuilt
    // at every derivative evaluation.
    auto rhs = [&](double tt, const Vector& yy) {
        SparseGenerator gen = build_generator(traj.sample(tt), beta, delta, opts.size_cap);
        Vector dy(yy.size());
        gen.apply(yy, dy);
        return dy;
    };
    detail::Rk45Options ro;
    ro.rel_tol = opts.rel_tol;
    ro.abs_tol = opts.abs_tol;
    ro.derivative_tol = opts.derivative_tol;
    bool held = false;
    for (double knot : knots) {
        if (knot > horizon) break;
        if (!held) {
            auto res = detail::rk45(rhs, t, y, knot, ro);
            y = res.y;
            held = res.early_stopped;
        }
        t = knot;
        if (wanted.count(knot)) {
            check_distribution(y, knot);
            out.times.push_back(knot);
            out.states.push_back(clamped(y));
        }
    }
    if (held) out.early_stop_time = t;
    return out;
}

}  // namespace sisnet
