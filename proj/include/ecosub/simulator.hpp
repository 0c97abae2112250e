#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ecosub/complementarity.hpp"
#include "ecosub/core_model.hpp"
#include "ecosub/mpe_solver.hpp"

namespace ecosub {

struct ShockWindow {
    int start = 0;  // first period inside the window
    int end = 0;    // one past the last period
    double sigma_mult = 1.0;
};

struct SimulationConfig {
    int horizon = 50;
    double m0 = 0.6;
    std::uint64_t seed = 0;
    std::optional<ShockWindow> shock_window;

    void validate(const ModelParams& p) const;
};

struct SimulationPath {
    std::vector<double> m, s_I, s_E, eta;
    std::vector<double> profit_I, profit_E_primary, psi_flow, profit_E_total;
    std::vector<double> cum_I, cum_E;
    bool incumbent_exit = false;
    int exit_period = -1;  // period whose shock pushed m below m_min

    int periods() const { return static_cast<int>(m.size()); }
};

SimulationPath simulate(const EquilibriumSolution& sol, const ModelParams& p,
                        const ComplementaritySpec& spec_E, const SimulationConfig& cfg);

struct DeviationReport {
    bool applicable = false;
    double m_star = 0.0;
    double s_I = 0.0, s_E = 0.0;
    double delta_m = 0.0;
    double saving = 0.0;  // s_I*(m*) m*
    double loss = 0.0;    // delta [V_I(m*) - V_I(m* + delta_m)]
    bool unprofitable = false;
};

DeviationReport deviation_experiment(const EquilibriumSolution& sol, const ModelParams& p,
                                     const ComplementaritySpec& spec_E,
                                     const SimulationConfig& cfg);

}  // namespace ecosub
