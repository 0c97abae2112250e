#include "ecosub/welfare.hpp"

#include <algorithm>
#include <cmath>

#include "ecosub/errors.hpp"

namespace ecosub {

void LinearMarket::validate() const {
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(mc)))
        throw InvalidInput("market parameters must be finite");
    if (!(b > 0)) throw InvalidInput("slope b must be > 0");
    if (!(mc >= 0)) throw InvalidInput("mc must be >= 0");
    if (!(a > mc)) throw InvalidInput("intercept a must exceed mc");
}

RegimeOutcome cournot_outcome(const LinearMarket& mkt, int n) {
    mkt.validate();
    if (n < 1) throw InvalidInput("cournot: n must be >= 1");
    RegimeOutcome r;
    double q_star = (mkt.a - mkt.mc) / mkt.b;
    r.Q = n * (mkt.a - mkt.mc) / ((n + 1) * mkt.b);
    r.P = mkt.a - mkt.b * r.Q;
    r.CS = 0.5 * mkt.b * r.Q * r.Q;
    r.PS = (r.P - mkt.mc) * r.Q;
    r.loss = 0.5 * mkt.b * (q_star - r.Q) * (q_star - r.Q);
    return r;
}

RegimeOutcome social_optimum(const LinearMarket& mkt) {
    mkt.validate();
    RegimeOutcome r;
    r.Q = (mkt.a - mkt.mc) / mkt.b;
    r.P = mkt.mc;
    r.CS = 0.5 * mkt.b * r.Q * r.Q;
    return r;
}

RegimeOutcome involution_outcome(const LinearMarket& mkt, double price) {
    mkt.validate();
    if (!(price < mkt.mc)) throw DomainError("involution_outcome: price must be below mc");
    RegimeOutcome r;
    double q_star = (mkt.a - mkt.mc) / mkt.b;
    r.P = price;
    r.Q = (mkt.a - price) / mkt.b;
    r.CS = 0.5 * mkt.b * r.Q * r.Q;
    r.transfer = (mkt.mc - price) * r.Q;
    r.PS = -r.transfer;
    r.loss = 0.5 * mkt.b * (r.Q - q_star) * (r.Q - q_star);
    return r;
}

double total_surplus(const LinearMarket& mkt) { return social_optimum(mkt).CS; }

CsGain cs_gain_from_subsidies(const EquilibriumSolution& sol, const ModelParams&,
                              const LinearMarket& mkt, double mapping, CsIntegrand integrand) {
    mkt.validate();
    CsGain g;
    if (!sol.m_star) return g;
    g.applicable = true;
    double m = *sol.m_star;
    double sI = policy_at(sol, sol.s_I, m);
    double sE = policy_at(sol, sol.s_E, m);
    g.unit_subsidy = mapping * (sI * m + sE * (1.0 - m));
    g.q_comp = (mkt.a - mkt.mc) / mkt.b;
    g.q_sub = g.q_comp + g.unit_subsidy / mkt.b;
    g.integrand = integrand == CsIntegrand::Literal ? mapping * (sI + sE) : g.unit_subsidy;
    g.gain = g.integrand * g.q_sub;
    return g;
}

double dynamic_efficiency(const ModelParams& p, double S, double T) {
    if (S < 0 || T < 0) throw InvalidInput("dynamic_efficiency: S and T must be >= 0");
    return -p.rho * S * T;
}

Crossover crossover_horizon(const ModelParams& p, double gain, double S, double ps_loss,
                            int cap) {
    if (gain < 0 || S < 0 || ps_loss < 0)
        throw InvalidInput("crossover_horizon: inputs must be >= 0");
    Crossover c;
    double rs = p.rho * S;
    if (rs <= 0) return c;
    double net = gain - ps_loss;
    c.bound = std::max(0.0, net) / ((1.0 - p.delta) * rs);
    double sum = 0.0, disc = 1.0;
    for (int T = 0; T <= cap; ++T) {
        sum += disc * net;
        disc *= p.delta;
        if (sum < rs * T) {
            c.T = T;
            return c;
        }
    }
    c.cap_hit = true;
    return c;
}

CapTable cap_comparative_static(const ComplementaritySpec& base_spec,
                                const std::vector<double>& caps, const ModelParams& p,
                                const SolverConfig& cfg) {
    if (!std::is_sorted(caps.begin(), caps.end()))
        throw InvalidInput("cap_comparative_static: caps must be sorted ascending");
    CapTable t;
    EquilibriumSolution ref = solve_mpe(p, base_spec, cfg);
    t.m_ref = ref.m_star;
    std::optional<double> prev;
    for (double cap : caps) {
        EquilibriumSolution sol = solve_mpe(p, make_capped(base_spec, cap), cfg);
        CapRow row;
        row.cap = cap;
        row.converged = sol.converged;
        row.m_star = sol.m_star;
        if (sol.m_star) row.s_E = policy_at(sol, sol.s_E, *sol.m_star);
        if (t.m_ref) row.s_E_ref = policy_at(sol, sol.s_E, *t.m_ref);
        if (row.m_star) {
            if (prev && row.s_E < *prev) t.monotone = false;
            prev = row.s_E;
        }
        t.rows.push_back(row);
    }
    return t;
}

}  // namespace ecosub
