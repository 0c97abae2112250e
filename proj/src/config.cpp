#include "ecosub/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fmt/format.h>
#include <map>
#include <set>

#include "ecosub/errors.hpp"

namespace ecosub {

// Generated from presets/*.yaml at configure time.
const std::map<std::string, std::string>& embedded_presets();

namespace {

using nlohmann::json;

std::string where(const YAML::Node& n) {
    const auto m = n.Mark();
    if (m.line < 0) return "";
    return fmt::format(" (line {}, column {})", m.line + 1, m.column + 1);
}

// Reads fields of one mapping and rejects keys nobody asked for.
class Section {
public:
    Section(const YAML::Node& node, std::string name) : node_(node), name_(std::move(name)) {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            throw ConfigError(fmt::format("section '{}' must be a mapping{}", name_, where(node_)));
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_ && node_.IsMap() && node_[key];
    }

    template <class T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        const YAML::Node v = node_[key];
        try {
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(
                fmt::format("{}.{}: cannot read value '{}'{}", name_, key, v.Scalar(), where(v)));
        }
        if constexpr (std::is_floating_point_v<T>) {
            if (!std::isfinite(out))
                throw ConfigError(fmt::format("{}.{} must be finite{}", name_, key, where(v)));
        }
    }

    YAML::Node child(const std::string& key) {
        has(key);
        return node_ && node_.IsMap() ? node_[key] : YAML::Node();
    }

    void finish() const {
        if (!node_ || !node_.IsMap()) return;
        for (const auto& kv : node_) {
            auto key = kv.first.as<std::string>();
            if (!seen_.count(key))
                throw ConfigError(
                    fmt::format("unknown key '{}' in {}{}", key, name_, where(kv.first)));
        }
    }

    const std::string& name() const { return name_; }

private:
    YAML::Node node_;
    std::string name_;
    std::set<std::string> seen_;
};

YAML::Node merge(const YAML::Node& base, const YAML::Node& over) {
    if (!base || !base.IsMap() || !over.IsMap()) return YAML::Clone(over);
    YAML::Node out = YAML::Clone(base);
    for (const auto& kv : over) {
        auto key = kv.first.as<std::string>();
        // A new psi kind replaces the whole spec instead of mixing fields.
        bool replace = kv.second.IsMap() && kv.second["kind"] && out[key] &&
                       out[key].IsMap() && out[key]["kind"] &&
                       out[key]["kind"].as<std::string>() != kv.second["kind"].as<std::string>();
        if (out[key] && !replace)
            out[key] = merge(out[key], kv.second);
        else
            out[key] = YAML::Clone(kv.second);
    }
    return out;
}

ComplementaritySpec read_spec(const YAML::Node& node, const std::string& name) {
    if (!node || node.IsNull()) return Zero{};
    Section s(node, name);
    std::string kind = "zero";
    s.read("kind", kind);
    ComplementaritySpec out;
    if (kind == "zero") {
        out = Zero{};
    } else if (kind == "power_affine") {
        PowerAffine v;
        s.read("lin", v.lin);
        s.read("coef", v.coef);
        s.read("exp", v.exp);
        out = v;
    } else if (kind == "logistic") {
        Logistic v;
        s.read("scale", v.scale);
        s.read("steepness", v.steepness);
        s.read("midpoint", v.midpoint);
        out = v;
    } else if (kind == "channels") {
        Channels v;
        s.read("data_scale", v.data_scale);
        s.read("conv_rate", v.conv_rate);
        s.read("margin", v.margin);
        s.read("nu", v.nu);
        s.read("q_bar", v.q_bar);
        out = v;
    } else if (kind == "capped") {
        double cap = 0.0;
        s.read("cap", cap);
        out = make_capped(read_spec(s.child("inner"), name + ".inner"), cap);
    } else {
        throw ConfigError(fmt::format("{}.kind: unknown kind '{}'{}", name, kind, where(node)));
    }
    s.finish();
    try {
        validate(out);
    } catch (const InvalidInput& e) {
        throw ConfigError(fmt::format("{}: {}", name, e.what()));
    }
    return out;
}

SweepDirection read_direction(const std::string& s) {
    if (s == "up") return SweepDirection::Up;
    if (s == "down") return SweepDirection::Down;
    if (s == "both") return SweepDirection::Both;
    throw ConfigError("sweep.direction must be up, down or both");
}

std::string direction_name(SweepDirection d) {
    switch (d) {
        case SweepDirection::Up: return "up";
        case SweepDirection::Down: return "down";
        case SweepDirection::Both: return "both";
    }
    return "both";
}

RegionAxis read_axis(const YAML::Node& node, const std::string& name) {
    RegionAxis a;
    Section s(node, name);
    s.read("path", a.path);
    s.read("lo", a.lo);
    s.read("hi", a.hi);
    s.read("steps", a.steps);
    s.finish();
    return a;
}

JobConfig from_node(const YAML::Node& root) {
    JobConfig c;
    Section top(root, "config");
    std::string job = "solve";
    top.read("job", job);
    auto kind = parse_job_name(job);
    if (!kind) throw ConfigError(fmt::format("job: unknown kind '{}'", job));
    c.kind = *kind;
    if (top.has("preset")) c.preset = root["preset"].as<std::string>();

    Section m(top.child("model"), "model");
    m.read("gamma", c.model.gamma);
    m.read("kappa", c.model.kappa);
    m.read("sigma", c.model.sigma);
    m.read("delta", c.model.delta);
    m.read("cost", c.model.cost);
    m.read("m_min", c.model.m_min);
    c.model.s_max = 2.0 * c.model.cost;
    m.read("s_max", c.model.s_max);
    m.read("rho", c.model.rho);
    m.read("franchise", c.model.franchise);
    m.read("subsidy_curvature", c.model.subsidy_curvature);
    m.finish();
    try {
        c.model.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(fmt::format("model: {}", e.what()));
    }

    c.psi = read_spec(top.child("psi"), "psi");

    Section sv(top.child("solver"), "solver");
    sv.read("grid_n", c.solver.grid_n);
    sv.read("action_n", c.solver.action_n);
    sv.read("quad_n", c.solver.quad_n);
    sv.read("tol", c.solver.tol);
    sv.read("max_iter", c.solver.max_iter);
    sv.read("relaxation", c.solver.relaxation);
    sv.read("stage_rounds", c.solver.stage_rounds);
    std::string ex = "quadrature";
    sv.read("expectation", ex);
    if (ex == "quadrature")
        c.solver.expectation = Expectation::Quadrature;
    else if (ex == "convolution")
        c.solver.expectation = Expectation::Convolution;
    else
        throw ConfigError("solver.expectation must be quadrature or convolution");
    sv.finish();
    try {
        c.solver.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(fmt::format("solver: {}", e.what()));
    }

    Section sim(top.child("simulation"), "simulation");
    sim.read("horizon", c.simulation.horizon);
    sim.read("m0", c.simulation.m0);
    sim.read("seed", c.simulation.seed);
    sim.read("seeds", c.seeds);
    if (sim.has("shock_window")) {
        ShockWindow w;
        Section sw(sim.child("shock_window"), "simulation.shock_window");
        sw.read("start", w.start);
        sw.read("end", w.end);
        sw.read("sigma_mult", w.sigma_mult);
        sw.finish();
        c.simulation.shock_window = w;
    }
    sim.finish();
    if (c.seeds < 1) throw ConfigError("simulation.seeds must be >= 1");
    try {
        c.simulation.validate(c.model);
    } catch (const InvalidInput& e) {
        throw ConfigError(fmt::format("simulation: {}", e.what()));
    }

    Section sw(top.child("sweep"), "sweep");
    sw.read("path", c.sweep.path);
    sw.read("lo", c.sweep.lo);
    sw.read("hi", c.sweep.hi);
    sw.read("steps", c.sweep.steps);
    sw.read("jump_factor", c.jump_factor);
    std::string dir = "both";
    sw.read("direction", dir);
    c.sweep.direction = read_direction(dir);
    sw.finish();

    Section rg(top.child("region"), "region");
    c.region_x = read_axis(rg.child("x"), "region.x");
    c.region_y = read_axis(rg.child("y"), "region.y");
    rg.finish();

    Section ty(top.child("types"), "types");
    c.types.spec_low = read_spec(ty.child("low"), "types.low");
    c.types.spec_high = read_spec(ty.child("high"), "types.high");
    ty.read("mu0", c.types.mu0);
    if (ty.has("m")) {
        double mm = 0.5;
        ty.read("m", mm);
        c.signal_m = mm;
    }
    ty.finish();

    Section mk(top.child("market"), "market");
    mk.read("a", c.market.a);
    mk.read("b", c.market.b);
    mk.read("mc", c.market.mc);
    mk.finish();

    Section wf(top.child("welfare"), "welfare");
    wf.read("cournot_n", c.welfare.cournot_n);
    wf.read("effective_price", c.welfare.effective_price);
    wf.read("mapping", c.welfare.mapping);
    std::string integ = "literal";
    wf.read("integrand", integ);
    if (integ == "literal")
        c.welfare.integrand = CsIntegrand::Literal;
    else if (integ == "share_weighted")
        c.welfare.integrand = CsIntegrand::ShareWeighted;
    else
        throw ConfigError("welfare.integrand must be literal or share_weighted");
    wf.read("use_solution", c.welfare.use_solution);
    wf.read("S", c.welfare.S);
    wf.read("horizon_T", c.welfare.horizon_T);
    wf.read("per_period_cs_gain", c.welfare.per_period_cs_gain);
    wf.read("ps_loss", c.welfare.ps_loss);
    wf.read("caps", c.welfare.caps);
    wf.finish();

    top.finish();

    // Kind-specific checks.
    try {
        if (c.kind == JobKind::Sweep) c.sweep.validate();
        if (c.kind == JobKind::Welfare) c.market.validate();
        if (c.kind == JobKind::Signal) c.types.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(fmt::format("{}: {}", job_name(c.kind), e.what()));
    }
    if (c.kind == JobKind::Region && (c.region_x.path.empty() || c.region_y.path.empty()))
        throw ConfigError("region: both axes need a path");
    return c;
}

YAML::Node parse_yaml(const std::string& text, const std::string& origin) {
    try {
        YAML::Node n = YAML::Load(text);
        if (n.IsNull()) return YAML::Node(YAML::NodeType::Map);
        if (!n.IsMap()) throw ConfigError(origin + ": top level must be a mapping");
        return n;
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("{}: syntax error at line {}, column {}: {}", origin,
                                      e.mark.line + 1, e.mark.column + 1, e.msg));
    }
}

YAML::Node resolve(const YAML::Node& doc, int depth = 0) {
    if (!doc["preset"]) return doc;
    if (depth > 8) throw ConfigError("preset chain too deep");
    auto name = doc["preset"].as<std::string>();
    const auto& all = embedded_presets();
    auto it = all.find(name);
    if (it == all.end()) throw ConfigError(fmt::format("preset: unknown preset '{}'", name));
    YAML::Node base = parse_yaml(it->second, "preset " + name);
    base = resolve(base, depth + 1);
    YAML::Node merged = merge(base, doc);
    merged["preset"] = name;
    return merged;
}

}  // namespace

std::string job_name(JobKind k) {
    switch (k) {
        case JobKind::Solve: return "solve";
        case JobKind::Simulate: return "simulate";
        case JobKind::Deviation: return "deviation";
        case JobKind::Sweep: return "sweep";
        case JobKind::Region: return "region";
        case JobKind::Welfare: return "welfare";
        case JobKind::Signal: return "signal";
        case JobKind::Check: return "check";
    }
    return "solve";
}

std::optional<JobKind> parse_job_name(const std::string& s) {
    for (JobKind k : {JobKind::Solve, JobKind::Simulate, JobKind::Deviation, JobKind::Sweep,
                      JobKind::Region, JobKind::Welfare, JobKind::Signal, JobKind::Check})
        if (job_name(k) == s) return k;
    return std::nullopt;
}

JobConfig parse_config(const std::string& text) {
    return from_node(resolve(parse_yaml(text, "config")));
}

JobConfig load_preset(const std::string& name) { return parse_config("preset: " + name + "\n"); }

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& kv : embedded_presets()) out.push_back(kv.first);
    return out;
}

std::string preset_text(const std::string& name) {
    const auto& all = embedded_presets();
    auto it = all.find(name);
    if (it == all.end()) throw ConfigError(fmt::format("unknown preset '{}'", name));
    return it->second;
}

json spec_to_json(const ComplementaritySpec& spec) {
    json j;
    j["kind"] = kind_name(spec);
    if (auto* v = std::get_if<PowerAffine>(&spec.v)) {
        j["lin"] = v->lin;
        j["coef"] = v->coef;
        j["exp"] = v->exp;
    } else if (auto* v = std::get_if<Logistic>(&spec.v)) {
        j["scale"] = v->scale;
        j["steepness"] = v->steepness;
        j["midpoint"] = v->midpoint;
    } else if (auto* v = std::get_if<Channels>(&spec.v)) {
        j["data_scale"] = v->data_scale;
        j["conv_rate"] = v->conv_rate;
        j["margin"] = v->margin;
        j["nu"] = v->nu;
        j["q_bar"] = v->q_bar;
    } else if (auto* v = std::get_if<Capped>(&spec.v)) {
        j["cap"] = v->cap;
        j["inner"] = spec_to_json(*v->inner);
    }
    return j;
}

json to_json(const JobConfig& c) {
    json j;
    j["job"] = job_name(c.kind);
    const auto& m = c.model;
    j["model"] = {{"gamma", m.gamma}, {"kappa", m.kappa}, {"sigma", m.sigma},
                  {"delta", m.delta}, {"cost", m.cost}, {"m_min", m.m_min},
                  {"s_max", m.s_max}, {"rho", m.rho}, {"franchise", m.franchise},
                  {"subsidy_curvature", m.subsidy_curvature}};
    j["psi"] = spec_to_json(c.psi);
    const auto& s = c.solver;
    j["solver"] = {{"grid_n", s.grid_n},
                   {"action_n", s.action_n},
                   {"quad_n", s.quad_n},
                   {"tol", s.tol},
                   {"max_iter", s.max_iter},
                   {"relaxation", s.relaxation},
                   {"stage_rounds", s.stage_rounds},
                   {"expectation",
                    s.expectation == Expectation::Quadrature ? "quadrature" : "convolution"}};
    json sim = {{"horizon", c.simulation.horizon},
                {"m0", c.simulation.m0},
                {"seed", c.simulation.seed},
                {"seeds", c.seeds}};
    if (c.simulation.shock_window) {
        const auto& w = *c.simulation.shock_window;
        sim["shock_window"] = {{"start", w.start}, {"end", w.end}, {"sigma_mult", w.sigma_mult}};
    }
    j["simulation"] = sim;
    j["sweep"] = {{"path", c.sweep.path},
                  {"lo", c.sweep.lo},
                  {"hi", c.sweep.hi},
                  {"steps", c.sweep.steps},
                  {"direction", direction_name(c.sweep.direction)},
                  {"jump_factor", c.jump_factor}};
    auto axis = [](const RegionAxis& a) {
        return json{{"path", a.path}, {"lo", a.lo}, {"hi", a.hi}, {"steps", a.steps}};
    };
    j["region"] = {{"x", axis(c.region_x)}, {"y", axis(c.region_y)}};
    j["types"] = {{"low", spec_to_json(c.types.spec_low)},
                  {"high", spec_to_json(c.types.spec_high)},
                  {"mu0", c.types.mu0}};
    if (c.signal_m) j["types"]["m"] = *c.signal_m;
    j["market"] = {{"a", c.market.a}, {"b", c.market.b}, {"mc", c.market.mc}};
    const auto& w = c.welfare;
    j["welfare"] = {{"cournot_n", w.cournot_n},
                    {"effective_price", w.effective_price},
                    {"mapping", w.mapping},
                    {"integrand", w.integrand == CsIntegrand::Literal ? "literal" : "share_weighted"},
                    {"use_solution", w.use_solution},
                    {"S", w.S},
                    {"horizon_T", w.horizon_T},
                    {"per_period_cs_gain", w.per_period_cs_gain},
                    {"ps_loss", w.ps_loss},
                    {"caps", w.caps}};
    return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const JobConfig& c) {
    return fmt::format("{:016x}", fnv1a64(to_json(c).dump()));
}

}  // namespace ecosub
