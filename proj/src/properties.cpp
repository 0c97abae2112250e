#include "ecosub/properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ecosub {

namespace {

struct Uniform {
    explicit Uniform(std::uint64_t seed) : eng(seed) {}
    double operator()(double lo, double hi) {
        return lo + (hi - lo) * ((eng() >> 11) * 0x1.0p-53);
    }
    std::mt19937_64 eng;
};

std::vector<double> draw(Uniform& u, int n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = u(lo, hi);
    return v;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

double contraction_ratio(const ModelParams& p, const ComplementaritySpec& spec,
                         const SolverConfig& cfg, int pairs, std::uint64_t seed) {
    Uniform u(seed);
    const int n = cfg.grid_n;
    double worst = 0.0;
    for (int k = 0; k < pairs; ++k) {
        double bound = u(0.1, 10.0);
        auto V = draw(u, n, -bound, bound);
        auto W = draw(u, n, -bound, bound);
        auto pol = draw(u, n, 0.0, p.s_max);
        double dvw = sup_diff(V, W);
        auto a = bellman_incumbent(p, spec, V, pol, cfg).value;
        auto b = bellman_incumbent(p, spec, W, pol, cfg).value;
        worst = std::max(worst, sup_diff(a, b) / dvw);
        a = bellman_entrant(p, spec, V, pol, cfg).value;
        b = bellman_entrant(p, spec, W, pol, cfg).value;
        worst = std::max(worst, sup_diff(a, b) / dvw);
    }
    return worst;
}

OperatorProperties operator_properties(const ModelParams& p, const ComplementaritySpec& spec,
                                       const SolverConfig& cfg, int instances,
                                       std::uint64_t seed) {
    Uniform u(seed);
    const int n = cfg.grid_n;
    OperatorProperties r;
    for (int k = 0; k < instances; ++k) {
        auto V = draw(u, n, -5.0, 5.0);
        auto bump = draw(u, n, 0.0, 1.0);
        std::vector<double> W(n);
        for (int i = 0; i < n; ++i) W[i] = V[i] + bump[i];
        auto pol = draw(u, n, 0.0, p.s_max);
        double a = u(-3.0, 3.0);
        std::vector<double> Va(n);
        for (int i = 0; i < n; ++i) Va[i] = V[i] + a;

        for (bool survival : {false, true}) {
            auto tv = bellman_incumbent(p, spec, V, pol, cfg, survival).value;
            auto tw = bellman_incumbent(p, spec, W, pol, cfg, survival).value;
            for (int i = 0; i < n; ++i) r.monotone = r.monotone && tv[i] <= tw[i];
        }
        auto ev = bellman_entrant(p, spec, V, pol, cfg).value;
        auto ew = bellman_entrant(p, spec, W, pol, cfg).value;
        for (int i = 0; i < n; ++i) r.monotone = r.monotone && ev[i] <= ew[i];

        auto tv = bellman_incumbent(p, spec, V, pol, cfg, false).value;
        auto ta = bellman_incumbent(p, spec, Va, pol, cfg, false).value;
        auto eva = bellman_entrant(p, spec, Va, pol, cfg).value;
        for (int i = 0; i < n; ++i) {
            r.shift_error = std::max(r.shift_error, std::abs(ta[i] - tv[i] - p.delta * a));
            r.shift_error = std::max(r.shift_error, std::abs(eva[i] - ev[i] - p.delta * a));
            r.shift_scale = std::max({r.shift_scale, std::abs(tv[i]), std::abs(ev[i])});
        }
    }
    return r;
}

}  // namespace ecosub
