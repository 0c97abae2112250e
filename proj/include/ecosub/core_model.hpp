#pragma once

namespace ecosub {

enum class Firm { Incumbent, Entrant };

struct ModelParams {
    double gamma = 0.6;    // share response per unit subsidy differential
    double kappa = 1.0;    // weight on posted prices
    double sigma = 0.0;    // demand shock standard deviation
    double delta = 0.95;
    double cost = 1.0;     // marginal cost c
    double m_min = 0.35;   // survival threshold
    double s_max = 2.0;    // action bound, 2c by default
    double rho = 0.0;      // social return to R&D (welfare only)
    // Extensions, both zero in the baseline game.
    double franchise = 0.0;          // incumbent standalone flow per unit share
    double subsidy_curvature = 0.0;  // quadratic adjustment cost phi*s^2/2

    // Throws InvalidInput naming the offending field.
    void validate() const;
};

struct MarketState {
    double m = 0.5;
};

struct FirmAction {
    double price = 0.0;
    double subsidy = 0.0;
};

// Share of the incumbent next period, clamped to [0,1].
double next_share(const ModelParams& p, double m, double s_I, double s_E,
                  double p_I, double p_E, double eta);

// Share next period at cost-based prices (Lemma 1), no clamp.
inline double share_drift(const ModelParams& p, double s_I, double s_E) {
    return p.gamma * (s_I - s_E);
}

// (price - c - subsidy) * Q_i(m).
double primary_profit(const ModelParams& p, double m, Firm firm, double price,
                      double subsidy);

}  // namespace ecosub
