#include "ecosub/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "ecosub/errors.hpp"
#include "ecosub/rng.hpp"

namespace ecosub {

void SimulationConfig::validate(const ModelParams& p) const {
    if (horizon < 1) throw InvalidInput("horizon must be >= 1");
    if (!(m0 > p.m_min && m0 < 1.0 - p.m_min))
        throw InvalidInput("m0 must lie in (m_min, 1 - m_min)");
    if (shock_window) {
        const auto& w = *shock_window;
        if (!(0 <= w.start && w.start <= w.end && w.end <= horizon))
            throw InvalidInput("shock_window must satisfy 0 <= start <= end <= horizon");
        if (!(w.sigma_mult >= 0)) throw InvalidInput("sigma_mult must be >= 0");
    }
}

SimulationPath simulate(const EquilibriumSolution& sol, const ModelParams& p,
                        const ComplementaritySpec& spec_E, const SimulationConfig& cfg) {
    cfg.validate(p);
    NormalStream rng(cfg.seed);
    SimulationPath path;
    double m = cfg.m0;
    double cum_I = 0.0, cum_E = 0.0, disc = 1.0;
    for (int t = 0; t < cfg.horizon; ++t) {
        double sI = policy_at(sol, sol.s_I, m);
        double sE = policy_at(sol, sol.s_E, m);
        double mult = 1.0;
        if (cfg.shock_window && t >= cfg.shock_window->start && t < cfg.shock_window->end)
            mult = cfg.shock_window->sigma_mult;
        double z = rng.next();
        double eta = p.sigma * mult * z;
        double pi_I = primary_profit(p, m, Firm::Incumbent, p.cost, sI);
        double pi_E = primary_profit(p, m, Firm::Entrant, p.cost, sE);
        double psi = psi_value(spec_E, 1.0 - m);
        double total = pi_E + psi;
        cum_I += disc * pi_I;
        cum_E += disc * total;
        disc *= p.delta;
        path.m.push_back(m);
        path.s_I.push_back(sI);
        path.s_E.push_back(sE);
        path.eta.push_back(eta);
        path.profit_I.push_back(pi_I);
        path.profit_E_primary.push_back(pi_E);
        path.psi_flow.push_back(psi);
        path.profit_E_total.push_back(total);
        path.cum_I.push_back(cum_I);
        path.cum_E.push_back(cum_E);
        m = next_share(p, m, sI, sE, p.cost, p.cost, eta);
        if (m < p.m_min) {
            path.incumbent_exit = true;
            path.exit_period = t;
            break;
        }
    }
    return path;
}

DeviationReport deviation_experiment(const EquilibriumSolution& sol, const ModelParams& p,
                                     const ComplementaritySpec&, const SimulationConfig&) {
    DeviationReport r;
    if (!sol.m_star) return r;
    r.applicable = true;
    r.m_star = *sol.m_star;
    r.s_I = policy_at(sol, sol.s_I, r.m_star);
    r.s_E = policy_at(sol, sol.s_E, r.m_star);
    r.delta_m = -p.gamma * r.s_E;
    r.saving = r.s_I * r.m_star;
    double m1 = std::clamp(r.m_star + r.delta_m, 0.0, 1.0);
    r.loss = p.delta * (interp(sol.grid, sol.v_I, r.m_star) - interp(sol.grid, sol.v_I, m1));
    r.unprofitable = r.delta_m == 0.0 ? false : r.saving < r.loss;
    return r;
}

}  // namespace ecosub
