#include "ecosub/signaling.hpp"

#include <algorithm>
#include <cmath>

#include "ecosub/errors.hpp"

namespace ecosub {

void TypeSpace::validate() const {
    ecosub::validate(spec_low);
    ecosub::validate(spec_high);
    if (!(mu0 >= 0 && mu0 <= 1)) throw InvalidInput("mu0 must be in [0,1]");
    for (int i = 0; i <= 1000; ++i) {
        double q = i / 1000.0;
        if (psi_value(spec_high, q) < psi_value(spec_low, q) - 1e-12)
            throw InvalidInput("types: spec_high must dominate spec_low");
    }
}

Benchmarks type_benchmarks(const TypeSpace& types, const ModelParams& p,
                           const SolverConfig& cfg) {
    types.validate();
    return {solve_mpe(p, types.spec_low, cfg), solve_mpe(p, types.spec_high, cfg)};
}

double signal_payoff(const ModelParams& p, const ComplementaritySpec& spec,
                     const EquilibriumSolution& own, double s_I, double m, double s) {
    double m1 = std::clamp(m + share_drift(p, s_I, s), 0.0, 1.0);
    return -s * (1.0 - m) - 0.5 * p.subsidy_curvature * s * s + psi_value(spec, 1.0 - m1) +
           p.delta * interp(own.grid, own.v_E, m1);
}

SignalingOutcome separating_threshold(const TypeSpace& types, const ModelParams& p,
                                      const Benchmarks& bench, const SolverConfig& cfg,
                                      std::optional<double> m_opt) {
    SignalingOutcome out;
    double m = m_opt ? *m_opt
                     : bench.low.m_star ? *bench.low.m_star
                                        : bench.high.m_star ? *bench.high.m_star : 0.5;
    if (!(m > 0 && m < 1)) throw InvalidInput("separating_threshold: m must be interior");
    out.m = m;
    const auto& L = bench.low;
    const auto& H = bench.high;
    out.s_low = policy_at(L, L.s_E, m);
    out.s_high_ci = policy_at(H, H.s_E, m);
    // The incumbent responds with the benchmark policy for the type it believes.
    double sI_low = policy_at(L, L.s_I, m);
    double sI_high = policy_at(H, H.s_I, m);
    auto U_low = [&](double s, bool believed_high) {
        return signal_payoff(p, types.spec_low, L, believed_high ? sI_high : sI_low, m, s);
    };
    auto U_high = [&](double s, bool believed_high) {
        return signal_payoff(p, types.spec_high, H, believed_high ? sI_high : sI_low, m, s);
    };
    const double own = U_low(out.s_low, false);
    auto gap = [&](double s) { return U_low(s, true) - own; };

    // Smallest s above s_low where mimicking stops paying.
    const double step = p.s_max / (cfg.action_n - 1);
    const int n = 4 * (cfg.action_n - 1);
    double a = out.s_low, ga = gap(a);
    bool found = false;
    double thr = 0.0;
    for (int k = 1; k <= n && !found; ++k) {
        double b = out.s_low + (p.s_max - out.s_low) * k / n;
        double gb = gap(b);
        if (ga > 0 && gb <= 0) {
            double lo = a, hi = b;
            while (hi - lo > 1e-10) {
                double mid = 0.5 * (lo + hi);
                (gap(mid) > 0 ? lo : hi) = mid;
            }
            thr = hi;
            found = true;
        }
        a = b;
        ga = gb;
    }
    if (!found) {
        if (gap(std::min(out.s_low + step, p.s_max)) > 0) {
            out.threshold = p.s_max;
            out.s_high = std::max(out.threshold, out.s_high_ci);
            out.diagnostic = "no indifference point in [0, s_max]: type gap too small";
            return out;
        }
        // Mimicry never pays: the least-cost separating signal is one action step.
        thr = std::min(out.s_low + step, p.s_max);
        out.diagnostic = "low-type IC slack at every signal above s_low";
    }
    out.indifference_found = found;
    out.threshold = thr;
    out.s_high = std::max(thr, out.s_high_ci);
    out.ic_slack_low = own - U_low(out.s_high, true);
    out.ic_slack_high = U_high(out.s_high, true) - U_high(out.s_low, false);
    out.separating = out.s_low < out.threshold && out.threshold <= out.s_high &&
                     out.ic_slack_low >= -1e-8 && out.ic_slack_high > 1e-8;
    if (!out.separating && out.diagnostic.empty())
        out.diagnostic = "high type does not strictly prefer the separating signal";
    return out;
}

std::optional<double> signaling_premium(const SignalingOutcome& o) {
    if (!o.separating) return std::nullopt;
    return o.s_high - o.s_high_ci;
}

}  // namespace ecosub
