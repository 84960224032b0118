#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sisnet/harness.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct Overrides {
    std::optional<double> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::string> prefix;
    std::optional<int> samples;
    std::optional<int> chain_cap;
    std::optional<double> derivative_tol;
    std::optional<double> rel_tol;
};

void apply(sisnet::Scenario& sc, const Overrides& o) {
    if (o.horizon) sc.run.horizon = *o.horizon;
    if (o.seed) sc.run.seed = *o.seed;
    if (o.output_dir) sc.output.dir = *o.output_dir;
    if (o.prefix) sc.output.prefix = *o.prefix;
    if (o.samples) sc.run.samples = *o.samples;
    if (o.chain_cap) sc.run.chain_cap = *o.chain_cap;
    if (o.derivative_tol) sc.run.derivative_tol = *o.derivative_tol;
    if (o.rel_tol) sc.run.rel_tol = *o.rel_tol;
}

void add_override_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--horizon", o.horizon, "Override the run horizon");
    cmd->add_option("--seed", o.seed, "Override the RNG seed");
    cmd->add_option("--output-dir", o.output_dir, "Override the output directory");
    cmd->add_option("--prefix", o.prefix, "Override the output file prefix");
    cmd->add_option("--samples", o.samples, "Override the interior sample count");
    cmd->add_option("--chain-cap", o.chain_cap, "Override the chain size cap");
    cmd->add_option("--derivative-tol", o.derivative_tol, "Override the early-stop tolerance");
    cmd->add_option("--rel-tol", o.rel_tol, "Override the solver relative tolerance");
}

sisnet::GraphTrajectory scenario_trajectory(const sisnet::Scenario& sc) {
    if (sc.topology)
        return sisnet::GraphTrajectory::constant(
            sisnet::static_topology(sc.topology->kind, sc.topology->n));
    sisnet::MobilityBundle bundle = sisnet::run_mobility_scenario(sc);
    auto traj = sisnet::GraphTrajectory::piecewise(bundle.step_times, bundle.graphs);
    traj.set_radius(sc.mobility->radius);
    return traj;
}

int cmd_run(const std::string& path, const Overrides& o) {
    sisnet::Scenario sc = sisnet::load_scenario(path);
    apply(sc, o);
    std::cout << sisnet::run_scenario_to_files(sc);
    return 0;
}

int cmd_tables(int which, const Overrides& o) {
    std::string dir = o.output_dir.value_or(".");
    std::string prefix = o.prefix.value_or("table" + std::to_string(which));
    auto records = sisnet::run_table_suite(which);
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(std::filesystem::path(dir) / (prefix + ".csv"), std::ios::binary);
        csv << sisnet::table_csv(records, which);
        std::ofstream jsonl(std::filesystem::path(dir) / (prefix + ".jsonl"), std::ios::binary);
        jsonl << sisnet::records_jsonl(records);
    }
    std::cout << sisnet::table_csv(records, which);
    for (const auto& rec : records)
        if (rec.flag.rfind("failed", 0) == 0) {
            std::cerr << "cell failed: " << rec.scenario_id << " (" << rec.flag << ")\n";
            return 1;
        }
    return 0;
}

int cmd_certify(const std::string& path, const Overrides& o, int grid_points, double window,
                double alpha) {
    sisnet::Scenario sc = sisnet::load_scenario(path);
    apply(sc, o);
    sisnet::GraphTrajectory traj = scenario_trajectory(sc);
    const auto grid = sisnet::uniform_grid(0.0, sc.run.horizon, grid_points);

    std::string out;
    if (traj.symmetric() && sc.params.homogeneous_beta()) {
        auto cert = sisnet::check_theorem1(traj, sc.params, grid);
        out += cert.to_json() + "\n";
    } else {
        auto cert = sisnet::check_theorem2(traj, sc.params, grid, window, alpha);
        out += cert.to_json() + "\n";
    }
    out += sisnet::gershgorin_certificate(traj, sc.params, grid).to_json() + "\n";
    if (traj.radius() > 0.0 && sc.params.homogeneous_beta()) {
        nlohmann::json j;
        j["condition"] = "proximity_bound";
        j["verdict"] = sisnet::to_string(
            sisnet::remark2_check(traj.agents(), sc.params.beta(0), sc.params.delta(0)));
        out += j.dump() + "\n";
    }
    if (sc.quarantine) {
        sisnet::QuarantinePolicy policy;
        policy.activation_step = sc.quarantine->activation_step;
        policy.group = sc.quarantine->group;
        policy.regions = sc.quarantine->regions;
        auto qc = sisnet::quarantine_certificate(traj, sc.params, policy, grid);
        nlohmann::json j;
        j["condition"] = "quarantine_blocks";
        j["verdict"] = sisnet::to_string(qc.overall);
        out += j.dump() + "\n";
    }

    std::filesystem::create_directories(sc.output.dir);
    std::ofstream file(std::filesystem::path(sc.output.dir) /
                           (sc.output.prefix + "_certificates.jsonl"),
                       std::ios::binary);
    file << out;
    std::cout << out;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SIS spread simulator and verification toolkit"};
    app.require_subcommand(1);

    Overrides o;
    std::string scenario_path;
    int table_id = 1;
    int grid_points = 201;
    double window = 0.0;
    double alpha = 0.0;

    auto* run = app.add_subcommand("run", "Execute a single scenario file");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    add_override_flags(run, o);

    auto* tables = app.add_subcommand("tables", "Run a comparison table suite (1-6)");
    tables->add_option("which", table_id, "Table id")->required()->check(CLI::Range(1, 6));
    add_override_flags(tables, o);

    auto* certify = app.add_subcommand("certify", "Emit stability certificates for a scenario");
    certify->add_option("scenario", scenario_path, "Scenario file")->required();
    certify->add_option("--grid-points", grid_points, "Certificate grid resolution");
    certify->add_option("--window", window, "Integral-condition window length");
    certify->add_option("--alpha", alpha, "Integral-condition offset");
    add_override_flags(certify, o);

    auto* version = app.add_subcommand("version", "Print the toolkit version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (version->parsed()) {
            std::cout << "sisnet " << kVersion << "\n";
            return 0;
        }
        if (run->parsed()) return cmd_run(scenario_path, o);
        if (tables->parsed()) return cmd_tables(table_id, o);
        if (certify->parsed()) return cmd_certify(scenario_path, o, grid_points, window, alpha);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
