#include "ecosub/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "ecosub/errors.hpp"

namespace ecosub {

double critical_threshold(const ModelParams& p) {
    return (1.0 - p.delta) / (p.delta * p.gamma * p.gamma);
}

ThresholdCrossing threshold_crossing(const ComplementaritySpec& spec, const ModelParams& p) {
    ThresholdCrossing out;
    const double target = critical_threshold(p);
    auto g = [&](double q) { return psi_marginal(spec, q) - target; };
    const int n = 2001;
    bool any_above = false, any_below = false;
    for (int i = 1; i < n - 1; ++i) {
        double gi = g(static_cast<double>(i) / (n - 1));
        any_above = any_above || gi > 0;
        any_below = any_below || gi < 0;
    }
    out.always_above = any_above && !any_below;
    out.always_below = any_below && !any_above;
    std::vector<double> roots;
    for (const Interval& iv : convexity_region(spec, 1001)) {
        const int k = 400;
        double a = iv.lo, ga = g(std::max(a, 1e-12));
        for (int i = 1; i <= k; ++i) {
            double b = iv.lo + (iv.hi - iv.lo) * i / k;
            double gb = g(std::min(b, 1.0 - 1e-12));
            if (ga < 0 && gb >= 0) {  // upward crossing, psi' > 0
                double lo = a, hi = b;
                while (hi - lo > 1e-10) {
                    double mid = 0.5 * (lo + hi);
                    (g(mid) < 0 ? lo : hi) = mid;
                }
                roots.push_back(0.5 * (lo + hi));
            }
            a = b;
            ga = gb;
        }
    }
    if (!roots.empty()) {
        out.q = *std::min_element(roots.begin(), roots.end());
        out.multiple = roots.size() > 1;
    }
    return out;
}

namespace {

using Setter = std::function<bool(ComplementaritySpec&, double)>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool set_spec_field(ComplementaritySpec& spec, const std::string& f, double x) {
    return std::visit(
        overloaded{
            [](Zero&) { return false; },
            [&](PowerAffine& s) {
                if (f == "lin") return s.lin = x, true;
                if (f == "coef") return s.coef = x, true;
                if (f == "exp") return s.exp = x, true;
                return false;
            },
            [&](Logistic& s) {
                if (f == "scale") return s.scale = x, true;
                if (f == "steepness") return s.steepness = x, true;
                if (f == "midpoint") return s.midpoint = x, true;
                return false;
            },
            [&](Channels& s) {
                if (f == "data_scale") return s.data_scale = x, true;
                if (f == "conv_rate") return s.conv_rate = x, true;
                if (f == "margin") return s.margin = x, true;
                if (f == "nu") return s.nu = x, true;
                if (f == "q_bar") return s.q_bar = x, true;
                return false;
            },
            [&](Capped& s) {
                if (f == "cap") return s.cap = x, true;
                ComplementaritySpec inner = *s.inner;
                if (!set_spec_field(inner, f, x)) return false;
                s.inner = std::make_shared<const ComplementaritySpec>(inner);
                return true;
            },
        },
        spec.v);
}

double* model_field(ModelParams& p, const std::string& f) {
    static const std::map<std::string, double ModelParams::*> fields = {
        {"gamma", &ModelParams::gamma},
        {"kappa", &ModelParams::kappa},
        {"sigma", &ModelParams::sigma},
        {"delta", &ModelParams::delta},
        {"cost", &ModelParams::cost},
        {"m_min", &ModelParams::m_min},
        {"s_max", &ModelParams::s_max},
        {"rho", &ModelParams::rho},
        {"franchise", &ModelParams::franchise},
        {"subsidy_curvature", &ModelParams::subsidy_curvature},
    };
    auto it = fields.find(f);
    return it == fields.end() ? nullptr : &(p.*(it->second));
}

}  // namespace

ModelPoint apply_parameter(const ModelPoint& base, const std::string& path, double x) {
    ModelPoint out = base;
    auto dot = path.find('.');
    std::string head = path.substr(0, dot);
    std::string field = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (head == "psi" && field == "factor") {
        out.spec = scale_spec(base.spec, x);
        return out;
    }
    if (head == "psi" && set_spec_field(out.spec, field, x)) return out;
    if (head == "model") {
        if (double* f = model_field(out.params, field)) {
            *f = x;
            return out;
        }
    }
    throw InvalidInput("unknown parameter path '" + path + "'");
}

void SweepSpec::validate() const {
    if (!(lo < hi)) throw InvalidInput("sweep: lo must be < hi");
    if (steps < 2) throw InvalidInput("sweep: steps must be >= 2");
}

StabilityCoefficient stability_coefficient(const EquilibriumSolution& sol, const ModelParams& p,
                                           double window) {
    StabilityCoefficient r;
    if (!sol.m_star) throw DomainError("stability_coefficient: no steady state");
    double m = *sol.m_star;
    double lo = m - window, hi = m + window;
    if (lo < p.m_min) {
        lo = m;
        r.one_sided = true;
    }
    if (hi > 1.0) {
        hi = m;
        r.one_sided = true;
    }
    if (hi <= lo) throw DomainError("stability_coefficient: degenerate stencil");
    r.dsI = (policy_at(sol, sol.s_I, hi) - policy_at(sol, sol.s_I, lo)) / (hi - lo);
    r.dsE = (policy_at(sol, sol.s_E, hi) - policy_at(sol, sol.s_E, lo)) / (hi - lo);
    r.rho = 1.0 + p.gamma * (r.dsI - r.dsE);
    return r;
}

namespace {

// Stable steady state nearest a reference share; falls back to the default pick.
std::optional<double> nearest_stable(const EquilibriumSolution& sol, std::optional<double> ref) {
    if (!ref) return sol.m_star;
    std::optional<double> best;
    for (const auto& s : sol.steady_states) {
        if (!s.stable) continue;
        if (!best || std::abs(s.m - *ref) < std::abs(*best - *ref)) best = s.m;
    }
    return best ? best : sol.m_star;
}

void run_sweep(const ModelPoint& base, const SweepSpec& sweep, const SolverConfig& cfg,
               bool ascending, std::vector<SweepPoint>& out) {
    WarmStart warm;
    bool have_warm = false;
    std::optional<double> prev_m;
    for (int k = 0; k < sweep.steps; ++k) {
        double x = sweep.value(ascending ? k : sweep.steps - 1 - k);
        ModelPoint pt = apply_parameter(base, sweep.path, x);
        SweepPoint sp;
        sp.param = x;
        sp.ascending = ascending;
        EquilibriumSolution sol = solve_mpe(pt.params, pt.spec, cfg, have_warm ? &warm : nullptr);
        sol.m_star = nearest_stable(sol, prev_m);
        sp.converged = sol.converged;
        sp.m_star = sol.m_star;
        if (sol.m_star) {
            double m = *sol.m_star;
            sp.s_E = policy_at(sol, sol.s_E, m);
            sp.s_I = policy_at(sol, sol.s_I, m);
            sp.rho_lin = stability_coefficient(sol, pt.params).rho;
            sp.psi_gap = psi_marginal(pt.spec, 1.0 - m) - critical_threshold(pt.params);
        }
        prev_m = sol.m_star;
        warm = {sol.v_I, sol.v_E, sol.s_E};
        have_warm = true;
        out.push_back(sp);
    }
}

double jump_tolerance(const std::vector<double>& inc, double factor) {
    // Changes at rounding level count as flat.
    constexpr double kFlat = 1e-12;
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    std::vector<double> all, moving;
    for (double d : inc) {
        all.push_back(d < kFlat ? 0.0 : d);
        if (d >= kFlat) moving.push_back(d);
    }
    if (moving.empty()) return 0.0;
    double m = median(all);
    // Mostly flat runs (policies move in action-grid steps): use the typical
    // nonzero step instead.
    return factor * (m > 0.0 ? m : median(moving));
}

void detect(std::vector<SweepPoint>& pts, size_t begin, size_t end, double factor,
            double& tol_out, std::vector<Jump>& jumps) {
    std::vector<double> inc;
    std::vector<size_t> left;
    for (size_t k = begin; k + 1 < end; ++k) {
        if (!pts[k].m_star || !pts[k + 1].m_star) continue;
        inc.push_back(std::abs(pts[k + 1].s_E - pts[k].s_E));
        left.push_back(k);
    }
    double tol = jump_tolerance(inc, factor);
    tol_out = tol;
    double biggest = 0.0;
    double split = 0.0;
    for (size_t j = 0; j < inc.size(); ++j) {
        if (tol > 0 && inc[j] > tol) {
            const auto& a = pts[left[j]];
            const auto& b = pts[left[j] + 1];
            Jump jp;
            jp.lo = std::min(a.param, b.param);
            jp.hi = std::max(a.param, b.param);
            jp.at = 0.5 * (jp.lo + jp.hi);
            jp.size = inc[j];
            jp.ascending = a.ascending;
            jumps.push_back(jp);
            if (inc[j] > biggest) {
                biggest = inc[j];
                split = 0.5 * (a.s_E + b.s_E);
            }
        }
    }
    for (size_t k = begin; k < end; ++k)
        pts[k].branch = (biggest > 0 && pts[k].m_star && pts[k].s_E > split) ? "high" : "low";
}

}  // namespace

BifurcationDiagram sweep_bifurcation(const ModelParams& base_params,
                                     const ComplementaritySpec& base_spec,
                                     const SweepSpec& sweep, const SolverConfig& cfg,
                                     double jump_factor) {
    sweep.validate();
    ModelPoint base{base_params, base_spec};
    BifurcationDiagram d;
    if (sweep.direction != SweepDirection::Down) run_sweep(base, sweep, cfg, true, d.points);
    size_t mid = d.points.size();
    if (sweep.direction != SweepDirection::Up) run_sweep(base, sweep, cfg, false, d.points);
    detect(d.points, 0, mid, jump_factor, d.jump_tol_up, d.jumps);
    detect(d.points, mid, d.points.size(), jump_factor, d.jump_tol_down, d.jumps);
    return d;
}

std::string class_name(RegionClass c) {
    switch (c) {
        case RegionClass::LowSubsidy: return "low-subsidy";
        case RegionClass::HighSubsidy: return "high-subsidy";
        case RegionClass::IncumbentExit: return "incumbent-exit";
        case RegionClass::NonConverged: return "non-converged";
    }
    return "unknown";
}

RegionClass classify(const EquilibriumSolution& sol, const ModelPoint& pt) {
    if (!sol.converged) return RegionClass::NonConverged;
    if (sol.m_star && *sol.m_star < pt.params.m_min) return RegionClass::IncumbentExit;
    if (!sol.m_star) {
        // Drift at the survival boundary decides between exit and dominance.
        double m0 = pt.params.m_min;
        double drift = policy_at(sol, sol.s_I, m0) - policy_at(sol, sol.s_E, m0);
        return drift < 0 ? RegionClass::IncumbentExit : RegionClass::LowSubsidy;
    }
    double q = 1.0 - *sol.m_star;
    return psi_marginal(pt.spec, q) > critical_threshold(pt.params) ? RegionClass::HighSubsidy
                                                                     : RegionClass::LowSubsidy;
}

std::vector<RegionCell> stability_region(const ModelParams& base_params,
                                         const ComplementaritySpec& base_spec,
                                         const RegionAxis& xa, const RegionAxis& ya,
                                         const SolverConfig& cfg) {
    if (xa.steps < 1 || ya.steps < 1) throw InvalidInput("region: steps must be >= 1");
    auto val = [](const RegionAxis& a, int k) {
        return a.steps == 1 ? a.lo : a.lo + (a.hi - a.lo) * k / (a.steps - 1);
    };
    ModelPoint base{base_params, base_spec};
    std::vector<RegionCell> out;
    for (int j = 0; j < ya.steps; ++j) {
        WarmStart warm;
        bool have = false;
        for (int i = 0; i < xa.steps; ++i) {
            RegionCell c;
            c.x = val(xa, i);
            c.y = val(ya, j);
            ModelPoint pt = apply_parameter(apply_parameter(base, xa.path, c.x), ya.path, c.y);
            try {
                pt.params.validate();
                validate(pt.spec);
                EquilibriumSolution sol = solve_mpe(pt.params, pt.spec, cfg, have ? &warm : nullptr);
                c.cls = classify(sol, pt);
                c.m_star = sol.m_star;
                warm = {sol.v_I, sol.v_E, sol.s_E};
                have = true;
            } catch (const InvalidInput&) {
                c.cls = RegionClass::NonConverged;
            }
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace ecosub
