#include "ecosub/mpe_solver.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecosub/errors.hpp"
#include "ecosub/quadrature.hpp"

namespace ecosub {

void SolverConfig::validate() const {
    if (grid_n < 64) throw InvalidInput("grid_n must be >= 64");
    if (action_n < 32) throw InvalidInput("action_n must be >= 32");
    if (quad_n < 3) throw InvalidInput("quad_n must be >= 3");
    if (!(tol > 0)) throw InvalidInput("tol must be > 0");
    if (max_iter < 1) throw InvalidInput("max_iter must be >= 1");
    if (!(relaxation > 0 && relaxation <= 1)) throw InvalidInput("relaxation must be in (0,1]");
    if (stage_rounds < 1) throw InvalidInput("stage_rounds must be >= 1");
}

namespace {

double norm_cdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }
double norm_pdf(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); }

// Row i holds the weights of E[v(clamp(x_i + sigma Z))] on the grid values,
// exact for the piecewise-linear interpolant.
std::vector<double> gaussian_kernel(const UniformGrid& g, double sigma) {
    const int n = g.n;
    const double h = g.step();
    std::vector<double> K(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double mu = g.at(i);
        double* row = &K[static_cast<size_t>(i) * n];
        row[0] += norm_cdf((g.lo - mu) / sigma);
        row[n - 1] += 1.0 - norm_cdf((g.hi - mu) / sigma);
        for (int j = 0; j + 1 < n; ++j) {
            double x0 = g.at(j), x1 = g.at(j + 1);
            double u0 = (x0 - mu) / sigma, u1 = (x1 - mu) / sigma;
            if (u1 < -9.0 || u0 > 9.0) continue;
            double m0 = norm_cdf(u1) - norm_cdf(u0);
            double m1 = mu * m0 + sigma * (norm_pdf(u0) - norm_pdf(u1));
            row[j] += std::max(0.0, (x1 * m0 - m1) / h);
            row[j + 1] += std::max(0.0, (m1 - x0 * m0) / h);
        }
        double total = 0.0;
        for (int j = 0; j < n; ++j) total += row[j];
        for (int j = 0; j < n; ++j) row[j] /= total;
    }
    return K;
}

}  // namespace

ShockExpectation::ShockExpectation(const UniformGrid& grid, double sigma,
                                   const SolverConfig& cfg)
    : grid_(grid), sigma_(sigma), kind_(cfg.expectation) {
    if (sigma_ > 0 && kind_ == Expectation::Quadrature) {
        auto rule = gauss_hermite(cfg.quad_n);
        nodes_ = rule.nodes;
        weights_ = rule.weights;
    } else if (sigma_ > 0) {
        kernel_ = gaussian_kernel(grid_, sigma_);
    }
}

void ShockExpectation::load(const std::vector<double>& v) {
    v_ = v;
    if (!kernel_.empty()) {
        const int n = grid_.n;
        w_.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            const double* row = &kernel_[static_cast<size_t>(i) * n];
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += row[j] * v_[j];
            w_[i] = acc;
        }
    }
}

double ShockExpectation::at(double x) const {
    if (sigma_ == 0) return interp(grid_, v_, x);
    if (!kernel_.empty()) return interp(grid_, w_, std::clamp(x, grid_.lo, grid_.hi));
    double acc = 0.0;
    for (size_t k = 0; k < nodes_.size(); ++k)
        acc += weights_[k] * interp(grid_, v_, x + sigma_ * nodes_[k]);
    return acc;
}

namespace {

UniformGrid share_grid(const SolverConfig& cfg) { return UniformGrid{0.0, 1.0, cfg.grid_n}; }

void check_sizes(const SolverConfig& cfg, const std::vector<double>& a,
                 const std::vector<double>& b) {
    if (static_cast<int>(a.size()) != cfg.grid_n || static_cast<int>(b.size()) != cfg.grid_n)
        throw InvalidInput("bellman: arrays must match grid_n");
}

// Generic pointwise maximization; flow(i, s) excludes the continuation.
template <class Flow, class Next>
BellmanResult maximize(const ModelParams& p, const SolverConfig& cfg,
                       const ShockExpectation& ex, Flow flow, Next next_mean) {
    const UniformGrid g = share_grid(cfg);
    const UniformGrid actions{0.0, p.s_max, cfg.action_n};
    BellmanResult r;
    r.value.assign(g.n, 0.0);
    r.policy.assign(g.n, 0.0);
    tbb::parallel_for(0, g.n, [&](int i) {
        double best = -std::numeric_limits<double>::infinity();
        double arg = 0.0;
        for (int a = 0; a < actions.n; ++a) {
            double s = actions.at(a);
            double val = flow(i, s) + p.delta * ex.at(next_mean(i, s));
            if (val > best) {  // strict: keeps the smallest maximizer
                best = val;
                arg = s;
            }
        }
        r.value[i] = best;
        r.policy[i] = arg;
    });
    return r;
}

BellmanResult incumbent_step(const ModelParams& p, const ShockExpectation& ex,
                             const std::vector<double>& s_E, const SolverConfig& cfg,
                             bool survival) {
    const UniformGrid g = share_grid(cfg);
    const double phi = p.subsidy_curvature;
    auto flow = [&](int i, double s) {
        double m = g.at(i);
        return -s * m - 0.5 * phi * s * s + p.franchise * m;
    };
    auto next = [&](int i, double s) { return g.at(i) + share_drift(p, s, s_E[i]); };
    BellmanResult r = maximize(p, cfg, ex, flow, next);
    if (survival) {
        for (int i = 0; i < g.n; ++i) {
            if (g.at(i) < p.m_min) {
                r.value[i] = 0.0;
                r.policy[i] = 0.0;
            } else if (r.value[i] < 0.0) {
                r.value[i] = 0.0;
            }
        }
    }
    return r;
}

BellmanResult entrant_step(const ModelParams& p, const ComplementaritySpec& spec,
                           const ShockExpectation& ex, const std::vector<double>& s_I,
                           const SolverConfig& cfg) {
    const UniformGrid g = share_grid(cfg);
    const double phi = p.subsidy_curvature;
    std::vector<double> psi_flow(g.n);
    for (int i = 0; i < g.n; ++i) psi_flow[i] = psi_value(spec, 1.0 - g.at(i));
    auto flow = [&](int i, double s) {
        double q = 1.0 - g.at(i);
        return -s * q - 0.5 * phi * s * s + psi_flow[i];
    };
    auto next = [&](int i, double s) { return g.at(i) + share_drift(p, s_I[i], s); };
    return maximize(p, cfg, ex, flow, next);
}

}  // namespace

BellmanResult bellman_incumbent(const ModelParams& p, const ComplementaritySpec&,
                                const std::vector<double>& v_I,
                                const std::vector<double>& s_E_policy,
                                const SolverConfig& cfg, bool survival) {
    check_sizes(cfg, v_I, s_E_policy);
    ShockExpectation ex(share_grid(cfg), p.sigma, cfg);
    ex.load(v_I);
    return incumbent_step(p, ex, s_E_policy, cfg, survival);
}

BellmanResult bellman_entrant(const ModelParams& p, const ComplementaritySpec& spec_E,
                              const std::vector<double>& v_E,
                              const std::vector<double>& s_I_policy,
                              const SolverConfig& cfg) {
    check_sizes(cfg, v_E, s_I_policy);
    ShockExpectation ex(share_grid(cfg), p.sigma, cfg);
    ex.load(v_E);
    return entrant_step(p, spec_E, ex, s_I_policy, cfg);
}

namespace {

// Payoffs of both firms at one grid point for a given action pair, with the
// continuation values held fixed.
struct StagePoint {
    const ModelParams& p;
    const ComplementaritySpec& spec;
    const ShockExpectation& ex_I;
    const ShockExpectation& ex_E;
    const UniformGrid& actions;
    double m = 0.0;
    double psi = 0.0;
    bool alive = true;  // m >= m_min

    double u_I(double s_I, double s_E) const {
        if (!alive) return 0.0;
        const double phi = p.subsidy_curvature;
        return -s_I * m - 0.5 * phi * s_I * s_I + p.franchise * m +
               p.delta * ex_I.at(m + share_drift(p, s_I, s_E));
    }
    double u_E(double s_I, double s_E) const {
        const double phi = p.subsidy_curvature;
        return -s_E * (1.0 - m) - 0.5 * phi * s_E * s_E + psi +
               p.delta * ex_E.at(m + share_drift(p, s_I, s_E));
    }
    // Smallest maximizer, and the maximum.
    std::pair<double, double> best_I(double s_E) const {
        if (!alive) return {0.0, 0.0};
        double best = -std::numeric_limits<double>::infinity(), arg = 0.0;
        for (int a = 0; a < actions.n; ++a) {
            double v = u_I(actions.at(a), s_E);
            if (v > best) best = v, arg = actions.at(a);
        }
        return {arg, best};
    }
    std::pair<double, double> best_E(double s_I) const {
        double best = -std::numeric_limits<double>::infinity(), arg = 0.0;
        for (int a = 0; a < actions.n; ++a) {
            double v = u_E(s_I, actions.at(a));
            if (v > best) best = v, arg = actions.at(a);
        }
        return {arg, best};
    }
};

struct StageResult {
    double s_I, s_E, v_I, v_E;
};

// Alternating best responses at one point, starting from the entrant's
// previous action. One round is the plain Gauss-Seidel update. When the
// rounds cycle, the visited profile with the smallest largest regret is kept.
StageResult stage_play(const StagePoint& pt, double s_E_prev, int rounds) {
    auto [a, vI] = pt.best_I(s_E_prev);
    auto [b, vE] = pt.best_E(a);
    if (rounds <= 1) return {a, b, vI, vE};
    std::vector<std::pair<double, double>> seen{{a, b}};
    for (int r = 1; r < rounds; ++r) {
        double a2 = pt.best_I(b).first;
        double b2 = pt.best_E(a2).first;
        if (a2 == a && b2 == b) return {a, b, pt.u_I(a, b), pt.u_E(a, b)};
        auto it = std::find(seen.begin(), seen.end(), std::make_pair(a2, b2));
        a = a2;
        b = b2;
        if (it != seen.end()) {
            std::vector<std::pair<double, double>> cycle(it, seen.end());
            double best_regret = std::numeric_limits<double>::infinity();
            for (auto [x, y] : cycle) {
                double reg = std::max(pt.best_I(y).second - pt.u_I(x, y),
                                      pt.best_E(x).second - pt.u_E(x, y));
                if (reg < best_regret) best_regret = reg, a = x, b = y;
            }
            break;
        }
        seen.emplace_back(a, b);
    }
    return {a, b, pt.u_I(a, b), pt.u_E(a, b)};
}

}  // namespace

EquilibriumSolution solve_mpe(const ModelParams& p, const ComplementaritySpec& spec_E,
                              const SolverConfig& cfg, const WarmStart* warm) {
    p.validate();
    validate(spec_E);
    cfg.validate();
    const UniformGrid g = share_grid(cfg);
    const UniformGrid actions{0.0, p.s_max, cfg.action_n};
    EquilibriumSolution sol;
    sol.grid = g;
    sol.v_I.assign(g.n, 0.0);
    sol.v_E.assign(g.n, 0.0);
    sol.s_I.assign(g.n, 0.0);
    sol.s_E.assign(g.n, 0.0);
    if (warm) {
        if (static_cast<int>(warm->v_I.size()) == g.n) sol.v_I = warm->v_I;
        if (static_cast<int>(warm->v_E.size()) == g.n) sol.v_E = warm->v_E;
        if (static_cast<int>(warm->s_E.size()) == g.n) sol.s_E = warm->s_E;
        for (int i = 0; i < g.n; ++i)
            if (g.at(i) < p.m_min) sol.v_I[i] = 0.0;
    }
    std::vector<double> psi_flow(g.n);
    for (int i = 0; i < g.n; ++i) psi_flow[i] = psi_value(spec_E, 1.0 - g.at(i));
    ShockExpectation ex_I(g, p.sigma, cfg), ex_E(g, p.sigma, cfg);
    const double w = cfg.relaxation;
    double res = std::numeric_limits<double>::infinity();
    int it = 0;
    std::vector<StageResult> step(g.n);
    while (it < cfg.max_iter) {
        ++it;
        ex_I.load(sol.v_I);
        ex_E.load(sol.v_E);
        tbb::parallel_for(0, g.n, [&](int i) {
            StagePoint pt{p, spec_E, ex_I, ex_E, actions, g.at(i), psi_flow[i], g.at(i) >= p.m_min};
            step[i] = stage_play(pt, sol.s_E[i], cfg.stage_rounds);
            if (!pt.alive) {
                step[i].s_I = 0.0;
                step[i].v_I = 0.0;
            } else if (step[i].v_I < 0.0) {
                step[i].v_I = 0.0;
            }
        });
        res = 0.0;
        for (int i = 0; i < g.n; ++i) {
            double nI = w * step[i].v_I + (1 - w) * sol.v_I[i];
            double nE = w * step[i].v_E + (1 - w) * sol.v_E[i];
            res = std::max({res, std::abs(nI - sol.v_I[i]), std::abs(nE - sol.v_E[i])});
            sol.v_I[i] = nI;
            sol.v_E[i] = nE;
            sol.s_I[i] = step[i].s_I;
            sol.s_E[i] = step[i].s_E;
        }
        if (res < cfg.tol) break;
    }
    sol.iterations = it;
    sol.final_residual = res;
    sol.converged = res < cfg.tol;
    sol.steady_states = find_steady_states(sol, p);
    sol.m_star = pick_steady_state(sol.steady_states);
    return sol;
}

std::vector<SteadyState> find_steady_states(const EquilibriumSolution& sol,
                                            const ModelParams& p) {
    (void)p;
    const UniformGrid& g = sol.grid;
    std::vector<SteadyState> out;
    auto gap = [&](int i) { return sol.s_I[i] - sol.s_E[i]; };
    int first = -1, prev = -1;  // first and last grid index with a nonzero gap
    for (int i = 0; i < g.n; ++i) {
        double d = gap(i);
        if (d == 0.0) continue;
        if (first < 0) {
            first = i;
            // Zero drift below and downward drift above: the share comes to
            // rest at the top of the flat stretch, typically after the
            // incumbent has exited.
            if (d < 0 && i > 0) out.push_back({g.at(i - 1), true});
        }
        if (prev >= 0) {
            double dp = gap(prev);
            if ((dp > 0) != (d > 0)) {
                double x0 = g.at(prev), x1 = g.at(i);
                double root = x0 + (x1 - x0) * dp / (dp - d);
                out.push_back({root, dp > 0});
            }
        }
        prev = i;
    }
    if (prev >= 0 && prev + 1 < g.n && gap(prev) > 0) out.push_back({g.at(prev + 1), true});
    return out;
}

std::optional<double> pick_steady_state(const std::vector<SteadyState>& all) {
    // Stable crossing with the widest basin between neighbouring crossings.
    std::optional<double> best;
    double widest = -1.0;
    for (size_t k = 0; k < all.size(); ++k) {
        if (!all[k].stable) continue;
        double lo = k > 0 ? all[k - 1].m : 0.0;
        double hi = k + 1 < all.size() ? all[k + 1].m : 1.0;
        if (hi - lo > widest) {
            widest = hi - lo;
            best = all[k].m;
        }
    }
    return best;
}

double policy_at(const EquilibriumSolution& sol, const std::vector<double>& s, double m) {
    return interp(sol.grid, s, m);
}

FocReport foc_crosscheck(const EquilibriumSolution& sol, const ModelParams& p,
                         const ComplementaritySpec& spec_E, const SolverConfig& cfg) {
    const UniformGrid& g = sol.grid;
    FocReport r;
    r.action_step = p.s_max / (cfg.action_n - 1);
    const double h = g.step();
    for (int i = 1; i + 1 < g.n; ++i) {
        double m = g.at(i);
        if (m < p.m_min) continue;
        bool inner_I = sol.s_I[i] > 0 && sol.s_I[i] < p.s_max;
        bool inner_E = sol.s_E[i] > 0 && sol.s_E[i] < p.s_max;
        if (!inner_I || !inner_E) continue;
        ++r.interior_points;
        double dVI = (sol.v_I[i + 1] - sol.v_I[i - 1]) / (2 * h);
        double dVE = (sol.v_E[i + 1] - sol.v_E[i - 1]) / (2 * h);
        double psi = psi_marginal(spec_E, 1.0 - m);
        double foc_I = p.delta * p.gamma * dVI;
        double foc_E = p.delta * p.gamma * std::abs(dVE) + psi;
        double gI = std::abs(foc_I - sol.s_I[i]);
        double gE = std::abs(foc_E - sol.s_E[i]);
        r.max_abs_gap_I = std::max(r.max_abs_gap_I, gI);
        r.max_abs_gap_E = std::max(r.max_abs_gap_E, gE);
        if (sol.s_E[i] < psi - r.action_step) ++r.lower_bound_violations;
        if (gI <= 2 * r.action_step && gE <= 2 * r.action_step)
            ++r.agree_points;
        else
            r.failing_m.push_back(m);
    }
    r.agree_fraction = r.interior_points ? double(r.agree_points) / r.interior_points : 1.0;
    return r;
}

SubsidizationReport subsidization_diagnostics(const EquilibriumSolution& sol,
                                              const ModelParams& p) {
    SubsidizationReport r;
    if (!sol.m_star) return r;
    r.applicable = true;
    double m = *sol.m_star;
    r.m_star = m;
    r.s_I = policy_at(sol, sol.s_I, m);
    r.s_E = policy_at(sol, sol.s_E, m);
    r.effective_price_I = p.cost - r.s_I;
    r.effective_price_E = p.cost - r.s_E;
    r.profit_I = primary_profit(p, m, Firm::Incumbent, p.cost, r.s_I);
    r.profit_E = primary_profit(p, m, Firm::Entrant, p.cost, r.s_E);
    r.below_cost_I = r.effective_price_I < p.cost;
    r.below_cost_E = r.effective_price_E < p.cost;
    r.profits_negative = r.profit_I < 0 && r.profit_E < 0;
    const double h = sol.grid.step();
    double dV = (interp(sol.grid, sol.v_I, m + h) - interp(sol.grid, sol.v_I, m - h)) / (2 * h);
    double s_bar = 0.5 * (r.s_I + r.s_E);
    r.theorem2_threshold = s_bar > 0 ? 1.0 - p.delta * p.gamma * dV / s_bar : 0.0;
    return r;
}

}  // namespace ecosub
