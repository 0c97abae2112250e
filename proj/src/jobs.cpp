#include "ecosub/jobs.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>

#include "ecosub/bifurcation.hpp"
#include "ecosub/errors.hpp"
#include "ecosub/io.hpp"
#include "ecosub/properties.hpp"
#include "ecosub/rng.hpp"

#ifndef ECOSUB_VERSION
#define ECOSUB_VERSION "0.0.0"
#endif

namespace ecosub {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Outputs {
public:
    Outputs(fs::path dir, RunManifest& m) : dir_(std::move(dir)), m_(m) {}
    void write(const std::string& name, const std::string& content) {
        write_file_atomic(dir_ / name, content);
        m_.files.push_back({name, fmt::format("{:016x}", fnv1a64(content))});
    }

private:
    fs::path dir_;
    RunManifest& m_;
};

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::string solution_csv(const EquilibriumSolution& s) {
    CsvWriter w({"m", "v_I", "v_E", "s_I", "s_E"});
    for (int i = 0; i < s.grid.n; ++i)
        w.row({fmt_double(s.grid.at(i)), fmt_double(s.v_I[i]), fmt_double(s.v_E[i]),
               fmt_double(s.s_I[i]), fmt_double(s.s_E[i])});
    return w.str();
}

json solution_summary(const EquilibriumSolution& s, const ModelParams& p,
                      const ComplementaritySpec& spec, const SolverConfig& cfg) {
    json j;
    j["converged"] = s.converged;
    j["iterations"] = s.iterations;
    j["final_residual"] = s.final_residual;
    j["m_star"] = opt_json(s.m_star);
    json ss = json::array();
    for (const auto& x : s.steady_states) ss.push_back({{"m", x.m}, {"stable", x.stable}});
    j["steady_states"] = ss;
    auto d = subsidization_diagnostics(s, p);
    j["subsidization"] = {{"applicable", d.applicable},
                          {"s_I", d.s_I},
                          {"s_E", d.s_E},
                          {"effective_price_I", d.effective_price_I},
                          {"effective_price_E", d.effective_price_E},
                          {"profit_I", d.profit_I},
                          {"profit_E", d.profit_E},
                          {"below_cost_I", d.below_cost_I},
                          {"below_cost_E", d.below_cost_E},
                          {"profits_negative", d.profits_negative},
                          {"theorem2_threshold", d.theorem2_threshold}};
    auto f = foc_crosscheck(s, p, spec, cfg);
    j["foc"] = {{"interior_points", f.interior_points},
                {"agree_points", f.agree_points},
                {"agree_fraction", f.agree_fraction},
                {"max_abs_gap_I", f.max_abs_gap_I},
                {"max_abs_gap_E", f.max_abs_gap_E},
                {"lower_bound_violations", f.lower_bound_violations},
                {"action_step", f.action_step}};
    if (s.m_star) {
        auto rc = stability_coefficient(s, p);
        j["stability"] = {{"rho_lin", rc.rho}, {"ds_I_dm", rc.dsI}, {"ds_E_dm", rc.dsE},
                          {"one_sided", rc.one_sided}};
    }
    j["critical_threshold"] = critical_threshold(p);
    return j;
}

std::string path_csv(const SimulationPath& p) {
    CsvWriter w({"t", "m", "s_I", "s_E", "eta", "profit_I", "profit_E_primary", "psi_flow",
                 "profit_E_total", "cum_I", "cum_E"});
    for (int t = 0; t < p.periods(); ++t)
        w.row({std::to_string(t), fmt_double(p.m[t]), fmt_double(p.s_I[t]),
               fmt_double(p.s_E[t]), fmt_double(p.eta[t]), fmt_double(p.profit_I[t]),
               fmt_double(p.profit_E_primary[t]), fmt_double(p.psi_flow[t]),
               fmt_double(p.profit_E_total[t]), fmt_double(p.cum_I[t]), fmt_double(p.cum_E[t])});
    return w.str();
}

json regime_json(const RegimeOutcome& r) {
    return {{"Q", r.Q}, {"P", r.P}, {"CS", r.CS}, {"PS", r.PS}, {"transfer", r.transfer},
            {"loss", r.loss}};
}

json cross_json(const Crossover& c) {
    json j;
    j["T_bar"] = c.T ? json(*c.T) : json(nullptr);
    j["bound"] = opt_json(c.bound);
    j["cap_hit"] = c.cap_hit;
    return j;
}

bool finish_solve(const EquilibriumSolution& s, RunManifest& m) {
    if (!s.converged) {
        m.status = "not-converged";
        m.exit_code = kExitNotConverged;
        return false;
    }
    return true;
}

void job_solve(const JobConfig& c, Outputs& out, RunManifest& m) {
    auto s = solve_mpe(c.model, c.psi, c.solver);
    out.write("solution.csv", solution_csv(s));
    auto j = solution_summary(s, c.model, c.psi, c.solver);
    j["config_hash"] = m.config_hash;
    out.write("summary.json", json_text(j));
    finish_solve(s, m);
}

void job_simulate(const JobConfig& c, Outputs& out, RunManifest& m) {
    auto s = solve_mpe(c.model, c.psi, c.solver);
    out.write("solution.csv", solution_csv(s));
    if (!finish_solve(s, m)) return;
    json runs = json::array();
    int exits = 0;
    double mean_tail = 0.0;
    int tail_n = 0;
    for (int k = 0; k < c.seeds; ++k) {
        SimulationConfig sc = c.simulation;
        sc.seed = c.simulation.seed + static_cast<std::uint64_t>(k);
        auto path = simulate(s, c.model, c.psi, sc);
        if (k == 0) out.write("path.csv", path_csv(path));
        exits += path.incumbent_exit;
        int half = sc.horizon / 2;
        for (int t = half; t < path.periods(); ++t) {
            mean_tail += path.m[t];
            ++tail_n;
        }
        runs.push_back({{"seed", sc.seed},
                        {"periods", path.periods()},
                        {"incumbent_exit", path.incumbent_exit},
                        {"exit_period", path.exit_period},
                        {"final_m", path.m.back()},
                        {"cum_I", path.cum_I.back()},
                        {"cum_E", path.cum_E.back()}});
    }
    json j;
    j["config_hash"] = m.config_hash;
    j["rng"] = kRngName;
    j["m_star"] = opt_json(s.m_star);
    j["runs"] = runs;
    j["exits"] = exits;
    j["mean_m_second_half"] = tail_n ? mean_tail / tail_n : 0.0;
    out.write("simulation.json", json_text(j));
}

void job_deviation(const JobConfig& c, Outputs& out, RunManifest& m) {
    auto s = solve_mpe(c.model, c.psi, c.solver);
    if (!finish_solve(s, m)) return;
    auto d = deviation_experiment(s, c.model, c.psi, c.simulation);
    json j = {{"applicable", d.applicable}, {"m_star", d.m_star},   {"s_I", d.s_I},
              {"s_E", d.s_E},               {"delta_m", d.delta_m}, {"saving", d.saving},
              {"loss", d.loss},             {"unprofitable", d.unprofitable},
              {"config_hash", m.config_hash}};
    out.write("deviation.json", json_text(j));
}

void job_sweep(const JobConfig& c, Outputs& out, RunManifest& m) {
    auto d = sweep_bifurcation(c.model, c.psi, c.sweep, c.solver, c.jump_factor);
    CsvWriter w({"parameter", "direction", "m_star", "s_I_star", "s_E_star", "rho_lin",
                 "branch", "converged"});
    for (const auto& p : d.points)
        w.row({fmt_double(p.param), p.ascending ? "up" : "down",
               p.m_star ? fmt_double(*p.m_star) : "", fmt_double(p.s_I), fmt_double(p.s_E),
               p.m_star ? fmt_double(p.rho_lin) : "", p.branch, p.converged ? "1" : "0"});
    out.write("diagram.csv", w.str());
    json jumps = json::array();
    for (const auto& jp : d.jumps)
        jumps.push_back({{"lo", jp.lo}, {"hi", jp.hi}, {"at", jp.at}, {"size", jp.size},
                         {"direction", jp.ascending ? "up" : "down"}});
    json j = {{"jumps", jumps},
              {"jump_tol_up", d.jump_tol_up},
              {"jump_tol_down", d.jump_tol_down},
              {"critical_threshold", critical_threshold(c.model)},
              {"config_hash", m.config_hash}};
    out.write("jumps.json", json_text(j));
    for (const auto& p : d.points)
        if (!p.converged) m.status = "partial";
}

void job_region(const JobConfig& c, Outputs& out, RunManifest& m) {
    auto cells = stability_region(c.model, c.psi, c.region_x, c.region_y, c.solver);
    CsvWriter w({"axis1", "axis2", "class", "m_star"});
    for (const auto& cell : cells)
        w.row({fmt_double(cell.x), fmt_double(cell.y), class_name(cell.cls),
               cell.m_star ? fmt_double(*cell.m_star) : ""});
    out.write("region.csv", w.str());
    (void)m;
}

void job_welfare(const JobConfig& c, Outputs& out, RunManifest& m) {
    const auto& mk = c.market;
    auto co = cournot_outcome(mk, c.welfare.cournot_n);
    auto so = social_optimum(mk);
    auto io = involution_outcome(mk, c.welfare.effective_price);
    CsvWriter w({"regime", "Q", "P", "CS", "PS", "transfer", "loss"});
    auto add = [&](const char* name, const RegimeOutcome& r) {
        w.row({name, fmt_double(r.Q), fmt_double(r.P), fmt_double(r.CS), fmt_double(r.PS),
               fmt_double(r.transfer), fmt_double(r.loss)});
    };
    add("cournot", co);
    add("social-optimum", so);
    add("involution", io);
    out.write("regimes.csv", w.str());
    json j;
    j["cournot"] = regime_json(co);
    j["social_optimum"] = regime_json(so);
    j["involution"] = regime_json(io);
    j["total_surplus"] = total_surplus(mk);
    j["dynamic_efficiency"] = dynamic_efficiency(c.model, c.welfare.S, c.welfare.horizon_T);
    j["crossover"] = cross_json(crossover_horizon(c.model, c.welfare.per_period_cs_gain,
                                                  c.welfare.S, c.welfare.ps_loss));
    if (c.welfare.use_solution) {
        auto s = solve_mpe(c.model, c.psi, c.solver);
        auto g = cs_gain_from_subsidies(s, c.model, mk, c.welfare.mapping, c.welfare.integrand);
        j["cs_gain"] = {{"applicable", g.applicable}, {"gain", g.gain},
                        {"integrand", g.integrand},   {"q_sub", g.q_sub},
                        {"q_comp", g.q_comp},         {"unit_subsidy", g.unit_subsidy}};
        if (!s.converged) {
            m.status = "not-converged";
            m.exit_code = kExitNotConverged;
        }
    }
    if (!c.welfare.caps.empty()) {
        auto t = cap_comparative_static(c.psi, c.welfare.caps, c.model, c.solver);
        json rows = json::array();
        for (const auto& r : t.rows)
            rows.push_back({{"cap", r.cap}, {"m_star", opt_json(r.m_star)}, {"s_E", r.s_E},
                            {"s_E_ref", r.s_E_ref}, {"converged", r.converged}});
        j["caps"] = {{"rows", rows}, {"monotone", t.monotone}, {"m_ref", opt_json(t.m_ref)}};
    }
    j["config_hash"] = m.config_hash;
    out.write("welfare.json", json_text(j));
}

json bench_json(const EquilibriumSolution& s) {
    return {{"converged", s.converged}, {"iterations", s.iterations}, {"m_star", opt_json(s.m_star)}};
}

void job_signal(const JobConfig& c, Outputs& out, RunManifest& m) {
    auto b = type_benchmarks(c.types, c.model, c.solver);
    auto o = separating_threshold(c.types, c.model, b, c.solver, c.signal_m);
    auto prem = signaling_premium(o);
    json j = {{"m", o.m},
              {"s_low", o.s_low},
              {"s_high", o.s_high},
              {"s_high_complete_info", o.s_high_ci},
              {"threshold", o.threshold},
              {"separating", o.separating},
              {"indifference_found", o.indifference_found},
              {"ic_slack_low", o.ic_slack_low},
              {"ic_slack_high", o.ic_slack_high},
              {"diagnostic", o.diagnostic},
              {"premium", opt_json(prem)},
              {"mu0", c.types.mu0},
              {"belief_rule", "mu(s) = 1 if s >= threshold else 0"},
              {"benchmark_low", bench_json(b.low)},
              {"benchmark_high", bench_json(b.high)},
              {"config_hash", m.config_hash}};
    out.write("signaling.json", json_text(j));
    if (!b.low.converged || !b.high.converged) {
        m.status = "not-converged";
        m.exit_code = kExitNotConverged;
    }
}

void job_check(const JobConfig&, Outputs& out, RunManifest& m) {
    auto items = self_check();
    json arr = json::array();
    bool ok = true;
    for (const auto& it : items) {
        arr.push_back({{"name", it.name}, {"passed", it.passed}, {"gating", it.gating},
                       {"value", it.value}, {"limit", it.limit}, {"note", it.note}});
        if (it.gating && !it.passed) ok = false;
    }
    out.write("check.json", json_text({{"checks", arr}, {"passed", ok}}));
    if (!ok) {
        m.status = "check-failed";
        m.exit_code = kExitInternal;
    }
}

}  // namespace

json manifest_json(const RunManifest& m) {
    json files = json::array();
    for (const auto& f : m.files) files.push_back({{"name", f.name}, {"fnv1a64", f.fnv1a}});
    json j = {{"config_hash", m.config_hash}, {"version", m.version}, {"rng", m.rng},
              {"job", m.job},                 {"status", m.status},   {"files", files},
              {"exit_code", m.exit_code}};
    if (m.wall_clock) j["wall_clock_seconds"] = *m.wall_clock;
    return j;
}

RunManifest run_job(const JobConfig& c, const fs::path& out_dir, const RunOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    RunManifest m;
    m.config_hash = config_hash(c);
    m.version = ECOSUB_VERSION;
    m.rng = kRngName;
    m.job = job_name(c.kind);
    m.status = "ok";
    Outputs out(out_dir, m);
    out.write("config.json", json_text(to_json(c)));
    switch (c.kind) {
        case JobKind::Solve: job_solve(c, out, m); break;
        case JobKind::Simulate: job_simulate(c, out, m); break;
        case JobKind::Deviation: job_deviation(c, out, m); break;
        case JobKind::Sweep: job_sweep(c, out, m); break;
        case JobKind::Region: job_region(c, out, m); break;
        case JobKind::Welfare: job_welfare(c, out, m); break;
        case JobKind::Signal: job_signal(c, out, m); break;
        case JobKind::Check: job_check(c, out, m); break;
    }
    if (opt.timing)
        m.wall_clock =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file_atomic(out_dir / "manifest.json", json_text(manifest_json(m)));
    return m;
}

std::vector<CheckItem> self_check() {
    std::vector<CheckItem> items;
    JobConfig cal = load_preset("calibration");
    const auto& p = cal.model;
    const auto& cfg = cal.solver;

    double ratio = contraction_ratio(p, cal.psi, cfg, 100, 17);
    items.push_back({"contraction", ratio <= p.delta + 1e-9, true, ratio, p.delta + 1e-9, ""});

    auto props = operator_properties(p, cal.psi, cfg, 20, 29);
    items.push_back({"monotonicity", props.monotone, true, props.monotone ? 1.0 : 0.0, 1.0, ""});
    double shift_lim = 64 * 2.2e-16 * std::max(1.0, props.shift_scale);
    items.push_back({"discounting", props.shift_error <= shift_lim, true, props.shift_error,
                     shift_lim, "raw operator, before the survival projection"});

    ModelParams base;
    SolverConfig zcfg = cfg;
    auto z = solve_mpe(base, Zero{}, zcfg);
    double zmax = 0.0;
    for (int i = 0; i < z.grid.n; ++i)
        zmax = std::max({zmax, std::abs(z.v_I[i]), std::abs(z.v_E[i]), z.s_I[i], z.s_E[i]});
    items.push_back({"zero-game", z.converged && zmax <= 1e-8, true, zmax, 1e-8, ""});

    auto s1 = solve_mpe(p, cal.psi, cfg);
    auto s2 = solve_mpe(p, scale_spec(cal.psi, 1.2), cfg);
    int bad = 0;
    for (int i = 0; i < s1.grid.n; ++i) {
        double m = s1.grid.at(i);
        if (m > p.m_min && m < 1.0 - p.m_min && s2.s_E[i] < s1.s_E[i]) ++bad;
    }
    items.push_back({"comparative-statics", s1.converged && s2.converged && bad == 0, true,
                     static_cast<double>(bad), 0.0, "grid points where s_E falls when psi x1.2"});

    auto foc = foc_crosscheck(s1, p, cal.psi, cfg);
    items.push_back({"foc-crosscheck", foc.agree_fraction >= 0.95, false, foc.agree_fraction, 0.95,
                     "advisory: the closed-form policies omit the share-weighted subsidy cost"});

    JobConfig f4 = load_preset("figure4");
    auto co = cournot_outcome(f4.market, 2);
    auto io = involution_outcome(f4.market, 10.0);
    double w = total_surplus(f4.market);
    double ident = std::max(std::abs(co.CS + co.PS + co.loss - w), std::abs(io.CS + io.PS + io.loss - w));
    items.push_back({"welfare-identity", ident <= 1e-9, true, ident, 1e-9, ""});
    double geom = std::max({std::abs(co.Q - 160.0 / 3), std::abs(co.P - 140.0 / 3),
                            std::abs(io.Q - 90.0), std::abs(io.loss - 50.0)});
    items.push_back({"figure4-geometry", geom <= 1e-9, true, geom, 1e-9, ""});
    return items;
}

}  // namespace ecosub
