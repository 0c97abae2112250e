#include "ecosub/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecosub/errors.hpp"

namespace ecosub {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidInput(msg);
}

}  // namespace

void ModelParams::validate() const {
    const double all[] = {gamma, kappa, sigma, delta, cost, m_min,
                          s_max, rho, franchise, subsidy_curvature};
    for (double v : all) require(std::isfinite(v), "model parameters must be finite");
    require(gamma > 0, "gamma must be > 0");
    require(kappa > 0, "kappa must be > 0");
    require(sigma >= 0, "sigma must be >= 0");
    require(delta > 0, "delta must be > 0");
    require(delta < 1, "delta must be < 1");
    require(cost > 0, "cost must be > 0");
    require(m_min > 0, "m_min must be > 0");
    require(m_min < 0.5, "m_min must be < 0.5");
    require(s_max > 0, "s_max must be > 0");
    require(rho >= 0, "rho must be >= 0");
    require(franchise >= 0, "franchise must be >= 0");
    require(subsidy_curvature >= 0, "subsidy_curvature must be >= 0");
}

double next_share(const ModelParams& p, double m, double s_I, double s_E,
                  double p_I, double p_E, double eta) {
    for (double v : {m, s_I, s_E, p_I, p_E, eta})
        require(std::isfinite(v), "next_share: non-finite input");
    // Subsidizing raises one's own share.
    double x = m + p.gamma * ((s_I - s_E) - p.kappa * (p_I - p_E)) + eta;
    return std::clamp(x, 0.0, 1.0);
}

double primary_profit(const ModelParams& p, double m, Firm firm, double price,
                      double subsidy) {
    for (double v : {m, price, subsidy})
        require(std::isfinite(v), "primary_profit: non-finite input");
    double q = firm == Firm::Incumbent ? m : 1.0 - m;
    return (price - p.cost - subsidy) * q;
}

}  // namespace ecosub
