#include "sisnet/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sisnet {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using SectionMap = std::map<std::string, std::map<std::string, Entry>>;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

SectionMap tokenize(const std::string& text) {
    SectionMap out;
    std::istringstream in(text);
    std::string raw;
    std::string section;  // "" = top level
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw ParseError(line, "empty section name");
            out[section];
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ParseError(line, "empty key");
        auto [it, inserted] = out[section].emplace(key, Entry{value, line, false});
        if (!inserted) throw ParseError(line, "duplicate key '" + key + "'");
    }
    return out;
}

double parse_double(const Entry& e, const std::string& key) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(e.value, &pos);
    } catch (const std::exception&) {
        throw ParseError(e.line, "field '" + key + "': expected a number, got '" + e.value + "'");
    }
    if (pos != e.value.size())
        throw ParseError(e.line, "field '" + key + "': trailing characters in '" + e.value + "'");
    return v;
}

long parse_int(const Entry& e, const std::string& key) {
    std::size_t pos = 0;
    long v;
    try {
        v = std::stol(e.value, &pos);
    } catch (const std::exception&) {
        throw ParseError(e.line, "field '" + key + "': expected an integer");
    }
    if (pos != e.value.size())
        throw ParseError(e.line, "field '" + key + "': trailing characters");
    return v;
}

bool parse_bool(const Entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ParseError(e.line, "field '" + key + "': expected true/false");
}

std::vector<double> parse_list(const Entry& e, const std::string& key) {
    std::istringstream in(e.value);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        std::size_t pos = 0;
        try {
            out.push_back(std::stod(tok, &pos));
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size())
            throw ParseError(e.line, "field '" + key + "': bad number '" + tok + "'");
    }
    if (out.empty()) throw ParseError(e.line, "field '" + key + "': empty list");
    return out;
}

class Reader {
public:
    Reader(SectionMap& map, std::string section) : map_(map), section_(std::move(section)) {}

    Entry* find(const std::string& key) {
        auto sit = map_.find(section_);
        if (sit == map_.end()) return nullptr;
        auto it = sit->second.find(key);
        if (it == sit->second.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }
    Entry& require(const std::string& key) {
        Entry* e = find(key);
        if (!e)
            throw ParseError(0, "section [" + section_ + "]: missing required key '" + key + "'");
        return *e;
    }
    bool has_section() const { return map_.count(section_) > 0; }

private:
    SectionMap& map_;
    std::string section_;
};

Vector to_vector(const std::vector<double>& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
    return out;
}

Vector rate_vector(Reader& r, const std::string& key, int n) {
    Entry& e = r.require(key);
    std::vector<double> vals = parse_list(e, key);
    if (vals.size() == 1) return Vector::Constant(n, vals[0]);
    if (static_cast<int>(vals.size()) != n)
        throw ParseError(e.line, "field '" + key + "': expected 1 or " + std::to_string(n) +
                                     " values, got " + std::to_string(vals.size()));
    return to_vector(vals);
}

Matrix parse_agent_matrix(const Entry& e, const std::string& key, int n, int d) {
    std::vector<double> vals = parse_list(e, key);
    if (static_cast<int>(vals.size()) != n * d)
        throw ParseError(e.line, "field '" + key + "': expected " + std::to_string(n * d) +
                                     " values (n x d, row major)");
    Matrix m(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) m(i, k) = vals[static_cast<std::size_t>(i) * d + k];
    return m;
}

const std::map<std::string, std::set<std::string>> kSchema = {
    {"", {"schema_version", "id"}},
    {"topology", {"kind", "n"}},
    {"mobility",
     {"n", "dimension", "radius", "steps", "dt", "positions", "velocities", "position_box",
      "speed", "box"}},
    {"virus", {"beta", "delta"}},
    {"initial", {"pattern", "values"}},
    {"run", {"models", "horizon", "derivative_tol", "rel_tol", "seed", "chain_cap", "samples"}},
    {"output", {"dir", "prefix", "full_distribution"}},
    {"noise", {"variant", "gains", "law", "law_mean", "dt", "dt_noise", "paths", "threshold"}},
    {"quarantine", {"activation_step", "groups"}},  // plus region_<g> keys
};

void reject_unknown(const SectionMap& map) {
    for (const auto& [section, entries] : map) {
        auto sit = kSchema.find(section);
        if (sit == kSchema.end()) {
            int line = entries.empty() ? 0 : entries.begin()->second.line;
            throw ParseError(line, "unknown section [" + section + "]");
        }
        for (const auto& [key, e] : entries) {
            if (sit->second.count(key)) continue;
            if (section == "quarantine" && key.rfind("region_", 0) == 0) continue;
            throw ParseError(e.line, "unknown key '" + key + "' in section [" + section + "]");
        }
    }
}

}  // namespace

int Scenario::agents() const {
    if (topology) return topology->n;
    if (mobility) return mobility->n;
    return static_cast<int>(params.beta.size());
}

bool Scenario::wants(Model m) const {
    return std::find(run.models.begin(), run.models.end(), m) != run.models.end();
}

std::vector<int> initial_bits_for(InitialPattern pattern, int n) {
    std::vector<int> bits(n, 0);
    switch (pattern) {
        case InitialPattern::AllInfected:
            std::fill(bits.begin(), bits.end(), 1);
            break;
        case InitialPattern::HalfInfected:
            std::fill(bits.begin(), bits.begin() + n / 2, 1);
            break;
        case InitialPattern::SingleInfected:
            bits[0] = 1;
            break;
        case InitialPattern::Explicit:
            throw InvalidInput("initial_bits_for: explicit pattern has no canonical bits");
    }
    return bits;
}

std::vector<int> Scenario::initial_bits() const {
    const int n = agents();
    if (initial == InitialPattern::Explicit) {
        std::vector<int> bits(n);
        for (int i = 0; i < n; ++i) {
            const double v = explicit_init(i);
            if (v != 0.0 && v != 1.0)
                throw InvalidInput("scenario: explicit initial condition is not a bit pattern");
            bits[i] = v == 1.0 ? 1 : 0;
        }
        return bits;
    }
    return initial_bits_for(initial, n);
}

Vector Scenario::initial_state() const {
    if (initial == InitialPattern::Explicit) return explicit_init;
    const auto bits = initial_bits();
    Vector p = Vector::Zero(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) p(i) = bits[i];
    return p;
}

Scenario parse_scenario(const std::string& text) {
    SectionMap map = tokenize(text);
    reject_unknown(map);
    Scenario sc;

    Reader top(map, "");
    if (Entry* e = top.find("schema_version")) {
        sc.schema_version = static_cast<int>(parse_int(*e, "schema_version"));
        if (sc.schema_version != 1)
            throw ParseError(e->line, "unsupported schema_version " + e->value);
    }
    if (Entry* e = top.find("id")) sc.id = e->value;

    Reader topo(map, "topology");
    Reader mob(map, "mobility");
    if (topo.has_section() == mob.has_section())
        throw ParseError(0, "exactly one of [topology] or [mobility] is required");

    int n = 0;
    if (topo.has_section()) {
        TopologySpec t;
        Entry& kind = topo.require("kind");
        if (kind.value == "line")
            t.kind = Topology::Line;
        else if (kind.value == "star")
            t.kind = Topology::Star;
        else if (kind.value == "complete")
            t.kind = Topology::Complete;
        else
            throw ParseError(kind.line, "field 'kind': expected line|star|complete");
        t.n = static_cast<int>(parse_int(topo.require("n"), "n"));
        if (t.n < 2) throw ParseError(0, "[topology] n must be >= 2");
        n = t.n;
        sc.topology = t;
    } else {
        MobilitySpec m;
        m.n = static_cast<int>(parse_int(mob.require("n"), "n"));
        if (m.n < 1) throw ParseError(0, "[mobility] n must be >= 1");
        if (Entry* e = mob.find("dimension")) m.dimension = static_cast<int>(parse_int(*e, "dimension"));
        if (m.dimension < 1) throw ParseError(0, "[mobility] dimension must be >= 1");
        m.radius = parse_double(mob.require("radius"), "radius");
        if (m.radius <= 0.0) throw ParseError(0, "[mobility] radius must be positive");
        if (Entry* e = mob.find("steps")) m.steps = static_cast<int>(parse_int(*e, "steps"));
        if (Entry* e = mob.find("dt")) m.dt = parse_double(*e, "dt");
        if (m.dt <= 0.0) throw ParseError(0, "[mobility] dt must be positive");
        Entry& pos = mob.require("positions");
        if (pos.value == "random") {
            m.random_positions = true;
            Entry& pb = mob.require("position_box");
            auto vals = parse_list(pb, "position_box");
            if (static_cast<int>(vals.size()) != m.dimension + 1)
                throw ParseError(pb.line, "field 'position_box': expected center (d values) + side");
            m.position_box_center = to_vector({vals.begin(), vals.end() - 1});
            m.position_box_side = vals.back();
        } else {
            m.positions = parse_agent_matrix(pos, "positions", m.n, m.dimension);
        }
        Entry& vel = mob.require("velocities");
        if (vel.value == "random") {
            m.random_velocities = true;
            if (Entry* e = mob.find("speed")) m.speed = parse_double(*e, "speed");
        } else {
            m.velocities = parse_agent_matrix(vel, "velocities", m.n, m.dimension);
        }
        if (Entry* e = mob.find("box")) {
            auto vals = parse_list(*e, "box");
            if (static_cast<int>(vals.size()) != m.dimension + 1)
                throw ParseError(e->line, "field 'box': expected center (d values) + side");
            m.reflecting = true;
            m.box_center = to_vector({vals.begin(), vals.end() - 1});
            m.box_side = vals.back();
            if (m.box_side <= 0.0) throw ParseError(e->line, "field 'box': side must be positive");
        }
        n = m.n;
        sc.mobility = m;
    }

    Reader virus(map, "virus");
    if (!virus.has_section()) throw ParseError(0, "missing required section [virus]");
    sc.params.beta = rate_vector(virus, "beta", n);
    sc.params.delta = rate_vector(virus, "delta", n);
    sc.params.validate();

    Reader init(map, "initial");
    if (!init.has_section()) throw ParseError(0, "missing required section [initial]");
    Entry& pat = init.require("pattern");
    if (pat.value == "p1" || pat.value == "all")
        sc.initial = InitialPattern::AllInfected;
    else if (pat.value == "p2" || pat.value == "half")
        sc.initial = InitialPattern::HalfInfected;
    else if (pat.value == "p3" || pat.value == "single")
        sc.initial = InitialPattern::SingleInfected;
    else if (pat.value == "explicit")
        sc.initial = InitialPattern::Explicit;
    else
        throw ParseError(pat.line, "field 'pattern': expected p1|p2|p3|explicit");
    if (sc.initial == InitialPattern::Explicit) {
        Entry& vals = init.require("values");
        auto v = parse_list(vals, "values");
        if (static_cast<int>(v.size()) != n)
            throw ParseError(vals.line, "field 'values': dimension mismatch (expected " +
                                            std::to_string(n) + ")");
        sc.explicit_init = to_vector(v);
        if (sc.explicit_init.minCoeff() < 0.0 || sc.explicit_init.maxCoeff() > 1.0)
            throw ParseError(vals.line, "field 'values': entries must lie in [0,1]");
    }

    Reader run(map, "run");
    if (run.has_section()) {
        if (Entry* e = run.find("models")) {
            std::istringstream in(e->value);
            std::string tok;
            sc.run.models.clear();
            while (in >> tok) {
                if (tok == "chain2n")
                    sc.run.models.push_back(Model::Chain2n);
                else if (tok == "meanfield")
                    sc.run.models.push_back(Model::MeanField);
                else if (tok == "aggregate")
                    sc.run.models.push_back(Model::Aggregate);
                else if (tok == "stochastic")
                    sc.run.models.push_back(Model::Stochastic);
                else
                    throw ParseError(e->line, "field 'models': unknown model '" + tok + "'");
            }
            if (sc.run.models.empty()) throw ParseError(e->line, "field 'models': empty");
        }
        if (Entry* e = run.find("horizon")) sc.run.horizon = parse_double(*e, "horizon");
        if (sc.run.horizon <= 0.0) throw ParseError(0, "[run] horizon must be positive");
        if (Entry* e = run.find("derivative_tol"))
            sc.run.derivative_tol = parse_double(*e, "derivative_tol");
        if (Entry* e = run.find("rel_tol")) sc.run.rel_tol = parse_double(*e, "rel_tol");
        if (Entry* e = run.find("seed"))
            sc.run.seed = static_cast<std::uint64_t>(parse_int(*e, "seed"));
        if (Entry* e = run.find("chain_cap"))
            sc.run.chain_cap = static_cast<int>(parse_int(*e, "chain_cap"));
        if (Entry* e = run.find("samples"))
            sc.run.samples = static_cast<int>(parse_int(*e, "samples"));
    }
    if (sc.wants(Model::Chain2n) && n > sc.run.chain_cap)
        throw ParseError(0, "chain2n requested with n = " + std::to_string(n) +
                                " above the size cap " + std::to_string(sc.run.chain_cap));

    Reader output(map, "output");
    if (output.has_section()) {
        if (Entry* e = output.find("dir")) sc.output.dir = e->value;
        if (Entry* e = output.find("prefix")) sc.output.prefix = e->value;
        if (Entry* e = output.find("full_distribution"))
            sc.output.full_distribution = parse_bool(*e, "full_distribution");
    }

    Reader noise(map, "noise");
    if (noise.has_section()) {
        NoiseConfig nc;
        Entry& variant = noise.require("variant");
        if (variant.value == "generic")
            nc.spec.kind = NoiseSpec::Kind::Generic;
        else if (variant.value == "ito")
            nc.spec.kind = NoiseSpec::Kind::Ito;
        else
            throw ParseError(variant.line, "field 'variant': expected generic|ito");
        Entry& gains = noise.require("gains");
        auto g = parse_list(gains, "gains");
        nc.spec.gains = g.size() == 1 ? Vector::Constant(n, g[0]) : to_vector(g);
        if (nc.spec.gains.size() != n)
            throw ParseError(gains.line, "field 'gains': dimension mismatch");
        if (Entry* e = noise.find("law")) {
            if (e->value == "gaussian")
                nc.spec.law = NoiseLaw::Gaussian;
            else if (e->value == "uniform")
                nc.spec.law = NoiseLaw::Uniform;
            else if (e->value == "rademacher")
                nc.spec.law = NoiseLaw::Rademacher;
            else
                throw ParseError(e->line, "field 'law': expected gaussian|uniform|rademacher");
        }
        if (Entry* e = noise.find("law_mean")) nc.spec.law_mean = parse_double(*e, "law_mean");
        if (Entry* e = noise.find("dt")) nc.spec.dt = parse_double(*e, "dt");
        if (Entry* e = noise.find("dt_noise")) nc.spec.dt_noise = parse_double(*e, "dt_noise");
        if (Entry* e = noise.find("paths")) nc.paths = static_cast<int>(parse_int(*e, "paths"));
        if (Entry* e = noise.find("threshold")) nc.threshold = parse_double(*e, "threshold");
        nc.spec.seed = sc.run.seed;
        sc.noise = nc;
    }
    if (sc.wants(Model::Stochastic) && !sc.noise)
        throw ParseError(0, "stochastic model requested without a [noise] section");

    Reader quar(map, "quarantine");
    if (quar.has_section()) {
        if (!sc.mobility) throw ParseError(0, "[quarantine] requires a [mobility] section");
        QuarantineSpec q;
        q.activation_step = static_cast<int>(parse_int(quar.require("activation_step"), "activation_step"));
        Entry& groups = quar.require("groups");
        auto g = parse_list(groups, "groups");
        if (static_cast<int>(g.size()) != n)
            throw ParseError(groups.line, "field 'groups': must assign every agent exactly once");
        for (double v : g) {
            if (v < 0 || v != std::floor(v))
                throw ParseError(groups.line, "field 'groups': nonnegative integers expected");
            q.group.push_back(static_cast<int>(v));
        }
        int num_groups = 1 + *std::max_element(q.group.begin(), q.group.end());
        q.regions.assign(num_groups, std::nullopt);
        for (int gi = 0; gi < num_groups; ++gi) {
            if (Entry* e = quar.find("region_" + std::to_string(gi))) {
                auto vals = parse_list(*e, "region");
                const int d = sc.mobility->dimension;
                if (static_cast<int>(vals.size()) != d + 1)
                    throw ParseError(e->line, "region: expected center (d values) + side");
                QuarantinePolicy::Box box;
                box.center = to_vector({vals.begin(), vals.end() - 1});
                box.side = vals.back();
                q.regions[gi] = box;
            }
        }
        sc.quarantine = q;
    }

    // Any region_<g> key for a non-existent group is unknown.
    for (const auto& [key, e] : map["quarantine"]) {
        if (!e.used && key.rfind("region_", 0) == 0)
            throw ParseError(e.line, "key '" + key + "' does not match any group");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_vec(const Vector& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt(v(i));
    }
    return out;
}

std::string fmt_mat(const Matrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            if (i || k) out += ' ';
            out += fmt(m(i, k));
        }
    return out;
}

}  // namespace

std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream out;
    out << "schema_version = " << sc.schema_version << "\n";
    out << "id = " << sc.id << "\n\n";
    if (sc.topology) {
        out << "[topology]\n";
        const char* kind = sc.topology->kind == Topology::Line
                               ? "line"
                               : (sc.topology->kind == Topology::Star ? "star" : "complete");
        out << "kind = " << kind << "\n";
        out << "n = " << sc.topology->n << "\n\n";
    }
    if (sc.mobility) {
        const auto& m = *sc.mobility;
        out << "[mobility]\n";
        out << "n = " << m.n << "\n";
        out << "dimension = " << m.dimension << "\n";
        out << "radius = " << fmt(m.radius) << "\n";
        out << "steps = " << m.steps << "\n";
        out << "dt = " << fmt(m.dt) << "\n";
        if (m.random_positions) {
            out << "positions = random\n";
            out << "position_box = " << fmt_vec(m.position_box_center) << ' '
                << fmt(m.position_box_side) << "\n";
        } else {
            out << "positions = " << fmt_mat(m.positions) << "\n";
        }
        if (m.random_velocities) {
            out << "velocities = random\n";
            out << "speed = " << fmt(m.speed) << "\n";
        } else {
            out << "velocities = " << fmt_mat(m.velocities) << "\n";
        }
        if (m.reflecting)
            out << "box = " << fmt_vec(m.box_center) << ' ' << fmt(m.box_side) << "\n";
        out << "\n";
    }
    out << "[virus]\n";
    out << "beta = " << fmt_vec(sc.params.beta) << "\n";
    out << "delta = " << fmt_vec(sc.params.delta) << "\n\n";
    out << "[initial]\n";
    switch (sc.initial) {
        case InitialPattern::AllInfected: out << "pattern = p1\n"; break;
        case InitialPattern::HalfInfected: out << "pattern = p2\n"; break;
        case InitialPattern::SingleInfected: out << "pattern = p3\n"; break;
        case InitialPattern::Explicit:
            out << "pattern = explicit\n";
            out << "values = " << fmt_vec(sc.explicit_init) << "\n";
            break;
    }
    out << "\n[run]\n";
    out << "models =";
    for (Model m : sc.run.models) {
        switch (m) {
            case Model::Chain2n: out << " chain2n"; break;
            case Model::MeanField: out << " meanfield"; break;
            case Model::Aggregate: out << " aggregate"; break;
            case Model::Stochastic: out << " stochastic"; break;
        }
    }
    out << "\n";
    out << "horizon = " << fmt(sc.run.horizon) << "\n";
    out << "derivative_tol = " << fmt(sc.run.derivative_tol) << "\n";
    out << "rel_tol = " << fmt(sc.run.rel_tol) << "\n";
    out << "seed = " << sc.run.seed << "\n";
    out << "chain_cap = " << sc.run.chain_cap << "\n";
    out << "samples = " << sc.run.samples << "\n";
    out << "\n[output]\n";
    out << "dir = " << sc.output.dir << "\n";
    out << "prefix = " << sc.output.prefix << "\n";
    out << "full_distribution = " << (sc.output.full_distribution ? "true" : "false") << "\n";
    if (sc.noise) {
        const auto& nc = *sc.noise;
        out << "\n[noise]\n";
        out << "variant = " << (nc.spec.kind == NoiseSpec::Kind::Generic ? "generic" : "ito")
            << "\n";
        out << "gains = " << fmt_vec(nc.spec.gains) << "\n";
        const char* law = nc.spec.law == NoiseLaw::Gaussian
                              ? "gaussian"
                              : (nc.spec.law == NoiseLaw::Uniform ? "uniform" : "rademacher");
        out << "law = " << law << "\n";
        out << "dt = " << fmt(nc.spec.dt) << "\n";
        if (nc.spec.dt_noise > 0.0) out << "dt_noise = " << fmt(nc.spec.dt_noise) << "\n";
        out << "paths = " << nc.paths << "\n";
        out << "threshold = " << fmt(nc.threshold) << "\n";
    }
    if (sc.quarantine) {
        const auto& q = *sc.quarantine;
        out << "\n[quarantine]\n";
        out << "activation_step = " << q.activation_step << "\n";
        out << "groups =";
        for (int g : q.group) out << ' ' << g;
        out << "\n";
        for (std::size_t gi = 0; gi < q.regions.size(); ++gi) {
            if (!q.regions[gi]) continue;
            out << "region_" << gi << " = " << fmt_vec(q.regions[gi]->center) << ' '
                << fmt(q.regions[gi]->side) << "\n";
        }
    }
    return out.str();
}

}  // namespace sisnet
