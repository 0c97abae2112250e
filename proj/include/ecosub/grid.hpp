#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace ecosub {

// Uniform grid of n points on [lo, hi].
struct UniformGrid {
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;

    double step() const { return (hi - lo) / (n - 1); }
    double at(int i) const { return i == n - 1 ? hi : lo + i * step(); }
    std::vector<double> points() const {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = at(i);
        return x;
    }
};

// Piecewise-linear interpolation of y on a uniform grid, x clamped to range.
inline double interp(const UniformGrid& g, const std::vector<double>& y, double x) {
    double t = (std::clamp(x, g.lo, g.hi) - g.lo) / g.step();
    int i = std::min(static_cast<int>(t), g.n - 2);
    double w = t - i;
    return (1.0 - w) * y[i] + w * y[i + 1];
}

}  // namespace ecosub
