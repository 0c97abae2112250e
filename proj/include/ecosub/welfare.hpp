#pragma once

#include <optional>
#include <vector>

#include "ecosub/complementarity.hpp"
#include "ecosub/core_model.hpp"
#include "ecosub/mpe_solver.hpp"

namespace ecosub {

// Inverse demand P = a - bQ with constant marginal cost mc.
struct LinearMarket {
    double a = 100.0;
    double b = 1.0;
    double mc = 20.0;

    void validate() const;
};

struct RegimeOutcome {
    double Q = 0.0, P = 0.0;
    double CS = 0.0;
    double PS = 0.0;        // (P - mc) Q, net of subsidies paid by firms
    double transfer = 0.0;  // subsidy outlay (mc - P) Q when P < mc
    double loss = 0.0;      // deadweight or overconsumption loss
};

RegimeOutcome cournot_outcome(const LinearMarket& mkt, int n);
RegimeOutcome social_optimum(const LinearMarket& mkt);
// Consumers pay effective_price < mc; firms fund the gap.
RegimeOutcome involution_outcome(const LinearMarket& mkt, double effective_price);

// Gross surplus at the social optimum; CS + PS + loss equals it in every regime.
double total_surplus(const LinearMarket& mkt);

enum class CsIntegrand {
    Literal,        // s_I + s_E over [0, Q_sub]
    ShareWeighted,  // s_I m + s_E (1 - m) over [0, Q_sub]
};

struct CsGain {
    bool applicable = false;
    double gain = 0.0;
    double integrand = 0.0;  // constant integrand value in market units
    double q_sub = 0.0;
    double q_comp = 0.0;
    double unit_subsidy = 0.0;  // market-unit subsidy that lowers the price
};

// Market units per game subsidy unit are set by `mapping`.
CsGain cs_gain_from_subsidies(const EquilibriumSolution& sol, const ModelParams& p,
                              const LinearMarket& mkt, double mapping = 1.0,
                              CsIntegrand integrand = CsIntegrand::Literal);

double dynamic_efficiency(const ModelParams& p, double S, double T);

struct Crossover {
    std::optional<int> T;            // smallest T where the loss term dominates
    std::optional<double> bound;     // gain / ((1 - delta) rho S), beyond which it always does
    bool cap_hit = false;
};

// Smallest integer T with sum_{t<=T} delta^t (gain - ps_loss) < rho S T.
// ps_loss is the per-period producer-surplus shortfall, zero unless included.
Crossover crossover_horizon(const ModelParams& p, double per_period_cs_gain, double S,
                            double ps_loss = 0.0, int horizon_cap = 100000);

struct CapRow {
    double cap = 0.0;
    std::optional<double> m_star;
    double s_E = 0.0;      // at the row's own m*, zero when absent
    double s_E_ref = 0.0;  // at the uncapped m*
    bool converged = false;
};

struct CapTable {
    std::vector<CapRow> rows;
    std::optional<double> m_ref;
    bool monotone = true;
};

CapTable cap_comparative_static(const ComplementaritySpec& base_spec,
                                const std::vector<double>& caps, const ModelParams& p,
                                const SolverConfig& cfg);

}  // namespace ecosub
