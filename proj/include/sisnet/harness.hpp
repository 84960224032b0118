#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sisnet/chain.hpp"
#include "sisnet/scenario.hpp"
#include "sisnet/stability.hpp"

namespace sisnet {

/// One model-comparison cell: both models run to the same effective horizon
/// from matched initial conditions.
struct ComparisonRecord {
    std::string scenario_id;
    int n = 0;
    double beta = 0.0, delta = 0.0;
    std::string init_label;
    bool has_chain = false, has_aggregate = false;
    double error = 0.0;          // ||v(T) - p(T)||_2, when the chain ran
    double sum_p = 0.0;          // sum_i p_i(T)
    double sum_v = 0.0;          // sum_i v_i(T)
    double aggregate_infected = 0.0;  // I(T), complete-graph scenarios
    bool mf_early_stop = false, chain_early_stop = false;
    std::string flag;            // anomaly / sensitivity notes
    std::string to_json() const;
};

double error_norm(const Vector& v, const Vector& p);

/// Values below 0.001 print as 0 in human-readable tables; machine output
/// keeps the raw number.
double presentation_round(double v);

ComparisonRecord run_comparison(const Scenario& sc);

/// Full paper grid for one table: 1-3 are line/star/complete error tables
/// (36 cells: n x ratio x initial condition), 4-6 are the complete-graph
/// three-model comparisons (12 cells, one initial condition per table).
std::vector<ComparisonRecord> run_table_suite(int which);

std::string table_csv(const std::vector<ComparisonRecord>& records, int which);
std::string records_jsonl(const std::vector<ComparisonRecord>& records);

struct MobilityBundle {
    std::vector<double> step_times;
    std::vector<Matrix> positions;     // per step, n x d
    std::vector<Matrix> graphs;        // per step
    MfTrajectory mf;
    std::optional<ChainTrajectory> chain;
    SpectralTrace trace;               // per-step; block_values filled after quarantine
    int quarantine_step = -1;
    std::string positions_csv() const;
    std::string mf_csv() const;
    std::string trace_csv() const;
};

/// Steps positions, rebuilds proximity weights each step (piecewise-constant
/// A(t)), applies the quarantine policy at its activation step, integrates the
/// selected models and records the spectral trace.
MobilityBundle run_mobility_scenario(const Scenario& sc);

/// Executes a scenario end to end, writing its output files; returns the
/// machine (JSONL) output that was written, for determinism checks.
std::string run_scenario_to_files(const Scenario& sc);

std::string format_float(double v);  // 17 significant digits

}  // namespace sisnet
