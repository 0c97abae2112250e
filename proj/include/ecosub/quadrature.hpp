#pragma once

#include <vector>

namespace ecosub {

// Nodes and weights with sum w_i f(x_i) ~ E[f(Z)], Z ~ N(0,1).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_hermite(int n);

}  // namespace ecosub
