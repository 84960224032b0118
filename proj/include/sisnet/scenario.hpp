#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sisnet/graph.hpp"
#include "sisnet/meanfield.hpp"
#include "sisnet/stochastic.hpp"

namespace sisnet {

enum class Model { Chain2n, MeanField, Aggregate, Stochastic };

enum class InitialPattern { AllInfected, HalfInfected, SingleInfected, Explicit };

struct TopologySpec {
    Topology kind = Topology::Line;
    int n = 0;
};

struct MobilitySpec {
    int n = 0;
    int dimension = 2;
    double radius = 1.0;
    int steps = 100;
    double dt = 1.0;
    // Explicit positions/velocities (n x d), or empty with random init inside
    // position_box / speed range, drawn from the scenario seed.
    Matrix positions;
    Matrix velocities;
    bool random_positions = false;
    bool random_velocities = false;
    Vector position_box_center;  // d
    double position_box_side = 0.0;
    double speed = 0.5;  // random velocity components uniform in [-speed, speed]
    bool reflecting = false;
    Vector box_center;  // d
    double box_side = 0.0;
};

struct QuarantineSpec {
    int activation_step = 0;
    std::vector<int> group;
    std::vector<std::optional<QuarantinePolicy::Box>> regions;
};

struct NoiseConfig {
    NoiseSpec spec;
    int paths = 200;
    double threshold = 1e-3;
};

struct RunSpec {
    std::vector<Model> models{Model::MeanField};
    double horizon = 10000.0;
    double derivative_tol = 1e-12;
    double rel_tol = 1e-8;
    std::uint64_t seed = 0;
    int chain_cap = 14;
    int samples = 0;  // interior sample count (besides t = 0 and T)
};

struct OutputSpec {
    std::string dir = ".";
    std::string prefix = "scenario";
    bool full_distribution = false;  // dump full chain state for n <= 10
};

struct Scenario {
    int schema_version = 1;
    std::string id = "scenario";
    std::optional<TopologySpec> topology;
    std::optional<MobilitySpec> mobility;
    VirusParams params;
    InitialPattern initial = InitialPattern::SingleInfected;
    Vector explicit_init;
    RunSpec run;
    OutputSpec output;
    std::optional<NoiseConfig> noise;
    std::optional<QuarantineSpec> quarantine;

    int agents() const;
    bool wants(Model m) const;
    /// Initial infection bit pattern (p1 / p2 / p3 conventions).
    std::vector<int> initial_bits() const;
    Vector initial_state() const;
};

/// Parses the key-value scenario document; rejects unknown sections/keys with
/// line numbers and validates cross-field constraints.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& sc);

std::vector<int> initial_bits_for(InitialPattern pattern, int n);

}  // namespace sisnet
