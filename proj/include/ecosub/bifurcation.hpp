#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecosub/complementarity.hpp"
#include "ecosub/core_model.hpp"
#include "ecosub/mpe_solver.hpp"

namespace ecosub {

// (1 - delta) / (delta gamma^2)
double critical_threshold(const ModelParams& p);

struct ThresholdCrossing {
    std::optional<double> q;
    bool multiple = false;
    bool always_above = false;
    bool always_below = false;
};

// Root of psi(q) = psi* inside the convexity region with psi' > 0 there.
ThresholdCrossing threshold_crossing(const ComplementaritySpec& spec, const ModelParams& p);

// A model point: parameters plus the entrant spec.
struct ModelPoint {
    ModelParams params;
    ComplementaritySpec spec;
};

// Applies value x to a named parameter. Paths: "psi.factor" multiplies the
// base spec; "psi.<field>" sets a field of the spec variant (or of the inner
// spec of a Capped, except "psi.cap"); "model.<field>" sets a ModelParams field.
ModelPoint apply_parameter(const ModelPoint& base, const std::string& path, double x);

enum class SweepDirection { Up, Down, Both };

struct SweepSpec {
    std::string path = "psi.factor";
    double lo = 0.0;
    double hi = 1.0;
    int steps = 2;
    SweepDirection direction = SweepDirection::Both;

    void validate() const;
    double value(int k) const { return lo + (hi - lo) * k / (steps - 1); }
};

struct SweepPoint {
    double param = 0.0;
    bool ascending = true;
    std::optional<double> m_star;
    double s_E = 0.0, s_I = 0.0;  // at m*, zero when m* is absent
    double rho_lin = 0.0;
    double psi_gap = 0.0;  // psi(1 - m*) - psi*, zero when m* is absent
    std::string branch = "low";
    bool converged = false;
};

struct Jump {
    double lo = 0.0, hi = 0.0;  // adjacent parameter values
    double at = 0.0;            // midpoint
    double size = 0.0;          // |delta s_E*(m*)|
    bool ascending = true;
};

struct BifurcationDiagram {
    std::vector<SweepPoint> points;  // ascending run first, then descending
    std::vector<Jump> jumps;
    double jump_tol_up = 0.0, jump_tol_down = 0.0;
};

BifurcationDiagram sweep_bifurcation(const ModelParams& base_params,
                                     const ComplementaritySpec& base_spec,
                                     const SweepSpec& sweep, const SolverConfig& cfg,
                                     double jump_factor = 10.0);

struct StabilityCoefficient {
    double rho = 1.0;
    double dsI = 0.0, dsE = 0.0;
    bool one_sided = false;
};

// rho_lin = 1 + gamma (ds_I/dm - ds_E/dm): the slope of the deterministic
// share map at m*. Derivatives are central differences of half-width
// `window` on the interpolated policies.
StabilityCoefficient stability_coefficient(const EquilibriumSolution& sol, const ModelParams& p,
                                           double window = 0.025);

enum class RegionClass { LowSubsidy, HighSubsidy, IncumbentExit, NonConverged };
std::string class_name(RegionClass c);

struct RegionCell {
    double x = 0.0, y = 0.0;
    RegionClass cls = RegionClass::LowSubsidy;
    std::optional<double> m_star;
};

struct RegionAxis {
    std::string path;
    double lo = 0.0, hi = 1.0;
    int steps = 2;
};

// Cells are solved row by row (y outer), each row warm-started along x.
std::vector<RegionCell> stability_region(const ModelParams& base_params,
                                         const ComplementaritySpec& base_spec,
                                         const RegionAxis& x_axis, const RegionAxis& y_axis,
                                         const SolverConfig& cfg);

RegionClass classify(const EquilibriumSolution& sol, const ModelPoint& pt);

}  // namespace ecosub
