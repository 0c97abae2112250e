#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecosub/complementarity.hpp"
#include "ecosub/core_model.hpp"
#include "ecosub/grid.hpp"

namespace ecosub {

enum class Expectation {
    Quadrature,   // Gauss-Hermite nodes through the interpolant
    Convolution,  // exact Gaussian integral of the interpolant, then interpolated
};

struct SolverConfig {
    int grid_n = 401;
    int action_n = 201;
    int quad_n = 7;
    double tol = 1e-8;
    int max_iter = 5000;
    Expectation expectation = Expectation::Quadrature;
    double relaxation = 1.0;  // weight on the new iterate
    // Best-response rounds per grid point and sweep with continuation values
    // held fixed. 1 is the plain alternating update.
    int stage_rounds = 1;

    void validate() const;
};

struct SteadyState {
    double m = 0.0;
    bool stable = false;  // drift crosses zero from above
};

struct EquilibriumSolution {
    UniformGrid grid;
    std::vector<double> v_I, v_E, s_I, s_E;
    std::optional<double> m_star;
    std::vector<SteadyState> steady_states;
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
};

// Expectation operator E[v(clamp(x + sigma*Z))] for a fixed grid and sigma.
class ShockExpectation {
public:
    ShockExpectation(const UniformGrid& grid, double sigma, const SolverConfig& cfg);
    // Prepares the operator for one value array; at() is valid until the next call.
    void load(const std::vector<double>& v);
    double at(double x) const;

private:
    UniformGrid grid_;
    double sigma_;
    Expectation kind_;
    std::vector<double> nodes_, weights_;
    std::vector<double> kernel_;  // row-major grid_n x grid_n, Convolution only
    std::vector<double> v_, w_;
};

struct BellmanResult {
    std::vector<double> value;
    std::vector<double> policy;
};

// Incumbent operator with s_E fixed. survival=false gives the raw operator
// without the m_min projection and the zero floor.
BellmanResult bellman_incumbent(const ModelParams& p, const ComplementaritySpec& spec_E,
                                const std::vector<double>& v_I,
                                const std::vector<double>& s_E_policy,
                                const SolverConfig& cfg, bool survival = true);

BellmanResult bellman_entrant(const ModelParams& p, const ComplementaritySpec& spec_E,
                              const std::vector<double>& v_E,
                              const std::vector<double>& s_I_policy,
                              const SolverConfig& cfg);

struct WarmStart {
    std::vector<double> v_I, v_E, s_E;
};

EquilibriumSolution solve_mpe(const ModelParams& p, const ComplementaritySpec& spec_E,
                              const SolverConfig& cfg,
                              const WarmStart* warm = nullptr);

// Rest points of the share dynamics: sign changes of s_I - s_E, linearly
// refined, plus the edge of a zero-drift stretch at either end of the grid.
std::vector<SteadyState> find_steady_states(const EquilibriumSolution& sol,
                                            const ModelParams& p);
std::optional<double> pick_steady_state(const std::vector<SteadyState>& all);

double policy_at(const EquilibriumSolution& sol, const std::vector<double>& s, double m);

struct FocReport {
    int interior_points = 0;
    int agree_points = 0;        // within 2 action steps on both policies
    double agree_fraction = 0.0;
    double max_abs_gap_I = 0.0;
    double max_abs_gap_E = 0.0;
    int lower_bound_violations = 0;  // s_E < psi(1-m) - one action step
    double action_step = 0.0;
    std::vector<double> failing_m;
};

FocReport foc_crosscheck(const EquilibriumSolution& sol, const ModelParams& p,
                         const ComplementaritySpec& spec_E, const SolverConfig& cfg);

struct SubsidizationReport {
    bool applicable = false;
    double m_star = 0.0;
    double s_I = 0.0, s_E = 0.0;
    double effective_price_I = 0.0, effective_price_E = 0.0;
    double profit_I = 0.0, profit_E = 0.0;
    bool below_cost_I = false, below_cost_E = false;
    bool profits_negative = false;
    double theorem2_threshold = 0.0;  // 1 - delta*gamma*V_I'(m*)/s_bar, diagnostic only
};

SubsidizationReport subsidization_diagnostics(const EquilibriumSolution& sol,
                                              const ModelParams& p);

}  // namespace ecosub
