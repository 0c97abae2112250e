#pragma once

#include <cstdint>

#include "ecosub/complementarity.hpp"
#include "ecosub/core_model.hpp"
#include "ecosub/mpe_solver.hpp"

namespace ecosub {

// Largest ||T V - T W|| / ||V - W|| over random bounded pairs, both operators,
// opponent policies drawn uniformly from [0, s_max].
double contraction_ratio(const ModelParams& p, const ComplementaritySpec& spec,
                         const SolverConfig& cfg, int pairs, std::uint64_t seed);

struct OperatorProperties {
    bool monotone = true;         // V <= W implies T V <= T W, raw and projected
    double shift_error = 0.0;     // max |T(V + a) - T(V) - delta a|, raw operators
    double shift_scale = 0.0;     // max |T(V)| seen, for relative tolerances
};

OperatorProperties operator_properties(const ModelParams& p, const ComplementaritySpec& spec,
                                       const SolverConfig& cfg, int instances,
                                       std::uint64_t seed);

}  // namespace ecosub
