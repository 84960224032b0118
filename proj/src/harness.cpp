#include "sisnet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sisnet/detail/rng.hpp"

namespace sisnet {

std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double error_norm(const Vector& v, const Vector& p) {
    if (v.size() != p.size()) throw InvalidInput("error_norm: dimension mismatch");
    return (v - p).norm();
}

double presentation_round(double v) {
    return std::abs(v) < 0.001 ? 0.0 : v;
}

std::string ComparisonRecord::to_json() const {
    nlohmann::json j;
    j["scenario_id"] = scenario_id;
    j["n"] = n;
    j["beta"] = beta;
    j["delta"] = delta;
    j["initial"] = init_label;
    j["has_chain"] = has_chain;
    j["has_aggregate"] = has_aggregate;
    if (has_chain) j["error"] = error;
    j["sum_p"] = sum_p;
    if (has_chain) j["sum_v"] = sum_v;
    if (has_aggregate) j["aggregate_infected"] = aggregate_infected;
    j["mf_early_stop"] = mf_early_stop;
    j["chain_early_stop"] = chain_early_stop;
    if (!flag.empty()) j["flag"] = flag;
    return j.dump();
}

namespace {

std::string init_label(InitialPattern p) {
    switch (p) {
        case InitialPattern::AllInfected: return "p1";
        case InitialPattern::HalfInfected: return "p2";
        case InitialPattern::SingleInfected: return "p3";
        case InitialPattern::Explicit: return "explicit";
    }
    return "?";
}

ComparisonRecord compare_on_graph(const GraphTrajectory& traj, const Scenario& sc,
                                  bool complete_graph) {
    const int n = sc.agents();
    ComparisonRecord rec;
    rec.scenario_id = sc.id;
    rec.n = n;
    rec.beta = sc.params.beta(0);
    rec.delta = sc.params.delta(0);
    rec.init_label = init_label(sc.initial);

    const double horizon = sc.run.horizon;
    const std::vector<double> samples{horizon};

    MfOptions mo;
    mo.rel_tol = sc.run.rel_tol;
    mo.derivative_tol = sc.run.derivative_tol;
    const Vector p0 = sc.initial_state();
    MfTrajectory mf = integrate_mf(p0, traj, sc.params, horizon, samples, mo);
    const Vector p_final = mf.states.back();
    rec.sum_p = p_final.sum();
    rec.mf_early_stop = mf.early_stop_time.has_value();

    if (sc.wants(Model::Chain2n)) {
        ChainOptions co;
        co.derivative_tol = sc.run.derivative_tol;
        co.rel_tol = sc.run.rel_tol;
        co.size_cap = sc.run.chain_cap;
        const Vector y0 = point_mass_from_bits(sc.initial_bits());
        ChainTrajectory chain =
            integrate_chain(y0, traj, sc.params.beta(0), sc.params.delta(0), horizon, samples, co);
        const Vector v_final = marginals(chain.states.back(), n);
        rec.has_chain = true;
        rec.sum_v = v_final.sum();
        rec.error = error_norm(v_final, p_final);
        rec.chain_early_stop = chain.early_stop_time.has_value();
    }

    if (sc.wants(Model::Aggregate) && complete_graph) {
        const auto bits = sc.initial_bits();
        const double i0 = std::accumulate(bits.begin(), bits.end(), 0.0);
        AggregateTrajectory agg =
            aggregate_sis(n - i0, i0, sc.params.beta(0), sc.params.delta(0), horizon, samples);
        rec.has_aggregate = true;
        rec.aggregate_infected = agg.infected.back();
    }
    return rec;
}

}  // namespace

ComparisonRecord run_comparison(const Scenario& sc) {
    if (!sc.topology) throw InvalidInput("run_comparison: scenario must define a static topology");
    if (!sc.params.homogeneous_beta())
        throw InvalidInput("run_comparison: chain comparison requires homogeneous rates");
    const Matrix a = static_topology(sc.topology->kind, sc.topology->n);
    return compare_on_graph(GraphTrajectory::constant(a), sc,
                            sc.topology->kind == Topology::Complete);
}

std::vector<ComparisonRecord> run_table_suite(int which) {
    if (which < 1 || which > 6) throw InvalidInput("run_table_suite: table id must be 1..6");
    static const int kAgents[] = {6, 8, 10, 13};
    static const std::pair<double, double> kRates[] = {{0.1, 1.0}, {0.5, 0.5}, {1.0, 0.1}};
    static const InitialPattern kInits[] = {InitialPattern::AllInfected,
                                            InitialPattern::HalfInfected,
                                            InitialPattern::SingleInfected};
    const bool error_table = which <= 3;
    const Topology kind = error_table
                              ? (which == 1 ? Topology::Line
                                            : (which == 2 ? Topology::Star : Topology::Complete))
                              : Topology::Complete;

    std::vector<ComparisonRecord> records;
    for (int n : kAgents) {
        for (auto [beta, delta] : kRates) {
            const auto inits =
                error_table ? std::vector<InitialPattern>{kInits[0], kInits[1], kInits[2]}
                            : std::vector<InitialPattern>{kInits[which - 4]};
            for (InitialPattern init : inits) {
                Scenario sc;
                sc.id = "table" + std::to_string(which) + "_n" + std::to_string(n);
                sc.topology = TopologySpec{kind, n};
                sc.params = VirusParams::homogeneous(n, beta, delta);
                sc.initial = init;
                sc.run.models = {Model::Chain2n, Model::MeanField};
                if (!error_table || kind == Topology::Complete)
                    sc.run.models.push_back(Model::Aggregate);
                ComparisonRecord rec;
                try {
                    rec = run_comparison(sc);
                } catch (const std::exception& e) {
                    rec.scenario_id = sc.id;
                    rec.n = n;
                    rec.beta = beta;
                    rec.delta = delta;
                    rec.init_label = init_label(init);
                    rec.flag = std::string("failed: ") + e.what();
                    records.push_back(rec);
                    continue;
                }
                const double ratio = beta / delta;
                if (which == 3 &&
                    ((n == 13 && ratio < 0.5) || (n == 10 && ratio == 1.0) ||
                     (n == 13 && ratio == 1.0)))
                    rec.flag = "solver-sensitive";
                records.push_back(rec);
            }
        }
    }
    return records;
}

std::string table_csv(const std::vector<ComparisonRecord>& records, int which) {
    std::ostringstream out;
    auto round2 = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", presentation_round(v));
        return std::string(buf);
    };
    if (which <= 3) {
        out << "n";
        for (const char* init : {"p1", "p2", "p3"})
            for (const char* r : {"0.1", "1", "10"}) out << ',' << init << "_ratio_" << r;
        out << '\n';
        for (int n : {6, 8, 10, 13}) {
            out << n;
            for (const char* init : {"p1", "p2", "p3"}) {
                for (double ratio : {0.1, 1.0, 10.0}) {
                    auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) {
                        return r.n == n && r.init_label == init &&
                               std::abs(r.beta / r.delta - ratio) < 1e-9;
                    });
                    out << ',' << (it == records.end() ? "" : round2(it->error));
                }
            }
            out << '\n';
        }
    } else {
        out << "n,ratio,I,sum_p,sum_v\n";
        for (const auto& r : records)
            out << r.n << ',' << presentation_round(r.beta / r.delta) << ','
                << round2(r.aggregate_infected) << ',' << round2(r.sum_p) << ','
                << (r.has_chain ? round2(r.sum_v) : "") << '\n';
    }
    return out.str();
}

std::string records_jsonl(const std::vector<ComparisonRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += r.to_json();
        out += '\n';
    }
    return out;
}

std::string MobilityBundle::positions_csv() const {
    std::ostringstream out;
    const auto d = positions.empty() ? 0 : positions.front().cols();
    out << "t,agent";
    for (Eigen::Index k = 0; k < d; ++k) out << ",z" << k;
    out << '\n';
    for (std::size_t s = 0; s < positions.size(); ++s)
        for (Eigen::Index i = 0; i < positions[s].rows(); ++i) {
            out << format_float(step_times[s]) << ',' << i;
            for (Eigen::Index k = 0; k < d; ++k) out << ',' << format_float(positions[s](i, k));
            out << '\n';
        }
    return out.str();
}

std::string MobilityBundle::mf_csv() const {
    std::ostringstream out;
    const auto n = mf.states.empty() ? 0 : mf.states.front().size();
    out << "t";
    for (Eigen::Index i = 0; i < n; ++i) out << ",p" << i;
    out << '\n';
    for (std::size_t s = 0; s < mf.times.size(); ++s) {
        out << format_float(mf.times[s]);
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_float(mf.states[s](i));
        out << '\n';
    }
    return out.str();
}

std::string MobilityBundle::trace_csv() const {
    std::ostringstream out;
    out << "t,value";
    for (std::size_t b = 0; b < trace.block_values.size(); ++b) out << ",block" << b;
    out << '\n';
    for (std::size_t s = 0; s < trace.times.size(); ++s) {
        out << format_float(trace.times[s]) << ',' << format_float(trace.values[s]);
        for (const auto& bv : trace.block_values)
            out << ',' << (std::isnan(bv[s]) ? "" : format_float(bv[s]));
        out << '\n';
    }
    return out.str();
}

MobilityBundle run_mobility_scenario(const Scenario& sc) {
    if (!sc.mobility) throw InvalidInput("run_mobility_scenario: no [mobility] section");
    const MobilitySpec& spec = *sc.mobility;
    const int n = spec.n;
    const int d = spec.dimension;

    std::mt19937_64 rng(detail::splitmix64(sc.run.seed));
    Matrix positions = spec.positions;
    if (spec.random_positions) {
        positions.resize(n, d);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k)
                positions(i, k) = spec.position_box_center(k) + spec.position_box_side * u(rng);
    }
    Matrix velocity = spec.velocities;
    if (spec.random_velocities) {
        velocity.resize(n, d);
        std::uniform_real_distribution<double> u(-spec.speed, spec.speed);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k) velocity(i, k) = u(rng);
    }

    // Per-agent confinement boxes; quarantine regions override at activation.
    std::vector<std::optional<QuarantinePolicy::Box>> agent_box(n);
    if (spec.reflecting)
        for (int i = 0; i < n; ++i)
            agent_box[i] = QuarantinePolicy::Box{spec.box_center, spec.box_side};

    QuarantinePolicy policy;
    if (sc.quarantine) {
        policy.activation_step = sc.quarantine->activation_step;
        policy.group = sc.quarantine->group;
        policy.regions = sc.quarantine->regions;
    }

    MobilityBundle bundle;
    bundle.quarantine_step = sc.quarantine ? sc.quarantine->activation_step : -1;
    const int steps = spec.steps;
    bool quarantined = false;
    for (int s = 0; s <= steps; ++s) {
        const double t = s * spec.dt;
        if (sc.quarantine && !quarantined && s >= sc.quarantine->activation_step) {
            quarantined = true;
            for (int i = 0; i < n; ++i) {
                const auto& region = policy.regions[policy.group[i]];
                if (!region) continue;
                agent_box[i] = *region;
                for (int k = 0; k < d; ++k) {
                    const double lo = region->center(k) - region->side / 2.0;
                    const double hi = region->center(k) + region->side / 2.0;
                    positions(i, k) = std::clamp(positions(i, k), lo, hi);
                }
            }
        }
        Matrix a = proximity_weights(positions, spec.radius);
        if (quarantined) a = apply_quarantine(a, policy);
        bundle.step_times.push_back(t);
        bundle.positions.push_back(positions);
        bundle.graphs.push_back(a);
        if (s == steps) break;
        // One mobility step with per-agent boxes (mirror + velocity flip).
        positions += velocity * spec.dt;
        for (int i = 0; i < n; ++i) {
            if (!agent_box[i]) continue;
            for (int k = 0; k < d; ++k) {
                const double lo = agent_box[i]->center(k) - agent_box[i]->side / 2.0;
                const double hi = agent_box[i]->center(k) + agent_box[i]->side / 2.0;
                double z = positions(i, k);
                while (z < lo || z > hi) {
                    z = z > hi ? 2.0 * hi - z : 2.0 * lo - z;
                    velocity(i, k) = -velocity(i, k);
                }
                positions(i, k) = std::clamp(z, lo, hi);
            }
        }
    }

    GraphTrajectory traj = GraphTrajectory::piecewise(bundle.step_times, bundle.graphs);
    traj.set_radius(spec.radius);
    const double horizon = steps * spec.dt;

    MfOptions mo;
    mo.rel_tol = sc.run.rel_tol;
    mo.derivative_tol = sc.run.derivative_tol;
    bundle.mf = integrate_mf(sc.initial_state(), traj, sc.params, horizon, bundle.step_times, mo);

    if (sc.wants(Model::Chain2n) && n <= sc.run.chain_cap) {
        if (!sc.params.homogeneous_beta())
            throw InvalidInput("run_mobility_scenario: chain requires homogeneous rates");
        ChainOptions co;
        co.derivative_tol = sc.run.derivative_tol;
        co.size_cap = sc.run.chain_cap;
        bundle.chain = integrate_chain(point_mass_from_bits(sc.initial_bits()), traj,
                                       sc.params.beta(0), sc.params.delta(0), horizon,
                                       bundle.step_times, co);
    }

    bundle.trace = spectral_trace(traj, sc.params, bundle.step_times);
    if (sc.quarantine) {
        const int q = policy.num_groups();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        bundle.trace.block_values.assign(q, std::vector<double>(bundle.step_times.size(), nan));
        for (std::size_t s = 0; s < bundle.step_times.size(); ++s) {
            if (static_cast<int>(s) < policy.activation_step) continue;
            for (int g = 0; g < q; ++g) {
                std::vector<int> idx;
                for (int i = 0; i < n; ++i)
                    if (policy.group[i] == g) idx.push_back(i);
                if (idx.empty()) continue;
                Matrix sub(idx.size(), idx.size());
                VirusParams bp;
                bp.beta.resize(idx.size());
                bp.delta.resize(idx.size());
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    bp.beta(i) = sc.params.beta(idx[i]);
                    bp.delta(i) = sc.params.delta(idx[i]);
                    for (std::size_t j = 0; j < idx.size(); ++j)
                        sub(i, j) = bundle.graphs[s](idx[i], idx[j]);
                }
                SpectralTrace one =
                    spectral_trace(GraphTrajectory::constant(sub), bp, {0.0});
                bundle.trace.block_values[g][s] = one.values[0];
            }
        }
    }
    return bundle;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write output file: " + path.string());
    out << content;
}

std::vector<double> sample_grid(const Scenario& sc) {
    std::vector<double> samples{sc.run.horizon};
    for (int i = 1; i <= sc.run.samples; ++i)
        samples.push_back(sc.run.horizon * i / (sc.run.samples + 1));
    samples.push_back(0.0);
    std::sort(samples.begin(), samples.end());
    return samples;
}

}  // namespace

std::string run_scenario_to_files(const Scenario& sc) {
    const std::filesystem::path dir(sc.output.dir);
    std::filesystem::create_directories(dir);
    const std::string prefix = sc.output.prefix;
    std::string machine;

    if (sc.mobility) {
        MobilityBundle bundle = run_mobility_scenario(sc);
        write_file(dir / (prefix + "_positions.csv"), bundle.positions_csv());
        write_file(dir / (prefix + "_meanfield.csv"), bundle.mf_csv());
        write_file(dir / (prefix + "_trace.csv"), bundle.trace_csv());
        if (bundle.chain) {
            std::ostringstream out;
            const int n = sc.agents();
            out << "t";
            for (int i = 0; i < n; ++i) out << ",v" << i;
            out << '\n';
            for (std::size_t s = 0; s < bundle.chain->times.size(); ++s) {
                const Vector v = marginals(bundle.chain->states[s], n);
                out << format_float(bundle.chain->times[s]);
                for (int i = 0; i < n; ++i) out << ',' << format_float(v(i));
                out << '\n';
            }
            write_file(dir / (prefix + "_chain_marginals.csv"), out.str());
        }
        nlohmann::json j;
        j["scenario_id"] = sc.id;
        j["n"] = sc.agents();
        j["steps"] = sc.mobility->steps;
        j["seed"] = sc.run.seed;
        j["final_sum_p"] = bundle.mf.states.back().sum();
        if (bundle.chain)
            j["final_sum_v"] = marginals(bundle.chain->states.back(), sc.agents()).sum();
        j["max_spectral_value"] = bundle.trace.max_value();
        j["quarantine_step"] = bundle.quarantine_step;
        machine = j.dump() + "\n";
        write_file(dir / (prefix + "_summary.jsonl"), machine);
        return machine;
    }

    if (sc.wants(Model::Stochastic)) {
        if (!sc.noise) throw InvalidInput("stochastic run without [noise] section");
        if (!sc.topology) throw InvalidInput("stochastic run requires a static topology");
        const Matrix a = static_topology(sc.topology->kind, sc.topology->n);
        GraphTrajectory traj = GraphTrajectory::constant(a);
        const std::vector<double> samples = sample_grid(sc);
        NoiseSpec spec = sc.noise->spec;
        spec.seed = sc.run.seed;
        EnsembleResult res =
            spec.kind == NoiseSpec::Kind::Generic
                ? simulate_generic_noise(sc.initial_state(), traj, sc.params, spec,
                                         sc.run.horizon, sc.noise->paths, samples)
                : simulate_ito(sc.initial_state(), traj, sc.params, spec, sc.run.horizon,
                               sc.noise->paths, samples);
        std::ostringstream csv;
        csv << "path";
        for (int i = 0; i < sc.agents(); ++i) csv << ",p" << i;
        csv << '\n';
        for (Eigen::Index r = 0; r < res.final_states.rows(); ++r) {
            csv << r;
            for (Eigen::Index i = 0; i < res.final_states.cols(); ++i)
                csv << ',' << format_float(res.final_states(r, i));
            csv << '\n';
        }
        write_file(dir / (prefix + "_paths.csv"), csv.str());
        nlohmann::json j;
        j["scenario_id"] = sc.id;
        j["paths"] = sc.noise->paths;
        j["seed"] = sc.run.seed;
        j["mean_final_norm"] = res.mean_path.back().norm();
        j["convergence_fraction"] = almost_sure_convergence_check(res, sc.noise->threshold);
        j["threshold"] = sc.noise->threshold;
        j["clamped_steps"] = res.clamped_steps;
        j["total_steps"] = res.total_steps;
        machine = j.dump() + "\n";
        write_file(dir / (prefix + "_summary.jsonl"), machine);
        return machine;
    }

    // Static comparison run.
    ComparisonRecord rec = run_comparison(sc);
    machine = rec.to_json() + "\n";
    write_file(dir / (prefix + "_record.jsonl"), machine);
    if (sc.run.samples > 0) {
        const Matrix a = static_topology(sc.topology->kind, sc.topology->n);
        GraphTrajectory traj = GraphTrajectory::constant(a);
        const std::vector<double> samples = sample_grid(sc);
        MfOptions mo;
        mo.rel_tol = sc.run.rel_tol;
        mo.derivative_tol = sc.run.derivative_tol;
        MfTrajectory mf = integrate_mf(sc.initial_state(), traj, sc.params, sc.run.horizon,
                                       samples, mo);
        std::ostringstream out;
        out << "t";
        for (int i = 0; i < sc.agents(); ++i) out << ",p" << i;
        out << '\n';
        for (std::size_t s = 0; s < mf.times.size(); ++s) {
            out << format_float(mf.times[s]);
            for (int i = 0; i < sc.agents(); ++i) out << ',' << format_float(mf.states[s](i));
            out << '\n';
        }
        write_file(dir / (prefix + "_meanfield.csv"), out.str());
        if (sc.wants(Model::Chain2n)) {
            ChainOptions co;
            co.derivative_tol = sc.run.derivative_tol;
            co.size_cap = sc.run.chain_cap;
            ChainTrajectory chain =
                integrate_chain(point_mass_from_bits(sc.initial_bits()), traj, sc.params.beta(0),
                                sc.params.delta(0), sc.run.horizon, samples, co);
            std::ostringstream cout_;
            const int n = sc.agents();
            cout_ << "t";
            for (int i = 0; i < n; ++i) cout_ << ",v" << i;
            cout_ << '\n';
            for (std::size_t s = 0; s < chain.times.size(); ++s) {
                const Vector v = marginals(chain.states[s], n);
                cout_ << format_float(chain.times[s]);
                for (int i = 0; i < n; ++i) cout_ << ',' << format_float(v(i));
                cout_ << '\n';
            }
            write_file(dir / (prefix + "_chain_marginals.csv"), cout_.str());
            if (sc.output.full_distribution && n <= 10) {
                std::ostringstream yout;
                yout << "t";
                for (std::int64_t k = 0; k < (std::int64_t{1} << n); ++k) yout << ",y" << k;
                yout << '\n';
                for (std::size_t s = 0; s < chain.times.size(); ++s) {
                    yout << format_float(chain.times[s]);
                    for (Eigen::Index k = 0; k < chain.states[s].size(); ++k)
                        yout << ',' << format_float(chain.states[s](k));
                    yout << '\n';
                }
                write_file(dir / (prefix + "_chain_full.csv"), yout.str());
            }
        }
    }
    return machine;
}

}  // namespace sisnet
