#pragma once

#include <optional>
#include <string>

#include "ecosub/complementarity.hpp"
#include "ecosub/core_model.hpp"
#include "ecosub/mpe_solver.hpp"

namespace ecosub {

struct TypeSpace {
    ComplementaritySpec spec_low;
    ComplementaritySpec spec_high;
    double mu0 = 0.5;  // stored and reported; the separating construction does not use it

    // Throws InvalidInput unless psi_high >= psi_low on a 1001-point grid.
    void validate() const;
};

struct Benchmarks {
    EquilibriumSolution low, high;
};

Benchmarks type_benchmarks(const TypeSpace& types, const ModelParams& p,
                           const SolverConfig& cfg);

struct SignalingOutcome {
    double m = 0.0;       // evaluation state
    double s_low = 0.0;   // low type's complete-information subsidy
    double s_high = 0.0;  // max(threshold, high type's complete-information subsidy)
    double s_high_ci = 0.0;
    double threshold = 0.0;
    bool separating = false;
    bool indifference_found = false;  // false when mimicry never pays (slack IC)
    double ic_slack_low = 0.0;
    double ic_slack_high = 0.0;
    std::string diagnostic;
};

// One-shot payoff of a type with (spec, benchmark solution) choosing s at m
// while the incumbent plays s_I: -s(1-m) + Psi(1-m') + delta V_E(m'),
// m' = clamp(m + gamma (s_I - s)).
double signal_payoff(const ModelParams& p, const ComplementaritySpec& spec,
                     const EquilibriumSolution& own, double s_I, double m, double s);

// m defaults (when absent) to the low benchmark's m*, then the high one's, then 0.5.
SignalingOutcome separating_threshold(const TypeSpace& types, const ModelParams& p,
                                      const Benchmarks& bench, const SolverConfig& cfg,
                                      std::optional<double> m = std::nullopt);

// s_high minus the high type's complete-information subsidy.
std::optional<double> signaling_premium(const SignalingOutcome& outcome);

}  // namespace ecosub
