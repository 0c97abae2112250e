#include "ecosub/complementarity.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "ecosub/errors.hpp"

namespace ecosub {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double value_unchecked(const ComplementaritySpec& spec, double q) {
    return std::visit(
        overloaded{
            [](const Zero&) { return 0.0; },
            [q](const PowerAffine& s) { return s.lin * q + s.coef * std::pow(q, s.exp); },
            [q](const Logistic& s) {
                return s.scale * (sigmoid(s.steepness * (q - s.midpoint)) -
                                  sigmoid(-s.steepness * s.midpoint));
            },
            [q](const Channels& s) {
                return s.data_scale * q * q + s.conv_rate * s.margin * q + s.nu * q * s.q_bar;
            },
            [q](const Capped& s) { return std::min(value_unchecked(*s.inner, q), s.cap); },
        },
        spec.v);
}

void check(bool ok, const char* msg) {
    if (!ok) throw InvalidInput(msg);
}

}  // namespace

ComplementaritySpec make_capped(const ComplementaritySpec& inner, double cap) {
    return Capped{std::make_shared<const ComplementaritySpec>(inner), cap};
}

void validate(const ComplementaritySpec& spec) {
    std::visit(overloaded{
                   [](const Zero&) {},
                   [](const PowerAffine& s) {
                       check(std::isfinite(s.lin) && s.lin >= 0, "lin must be >= 0");
                       check(std::isfinite(s.coef) && s.coef >= 0, "coef must be >= 0");
                       check(std::isfinite(s.exp) && s.exp > 1, "exp must be > 1");
                   },
                   [](const Logistic& s) {
                       check(std::isfinite(s.scale) && s.scale > 0, "scale must be > 0");
                       check(std::isfinite(s.steepness) && s.steepness > 0,
                             "steepness must be > 0");
                       check(s.midpoint > 0 && s.midpoint < 1, "midpoint must be in (0,1)");
                   },
                   [](const Channels& s) {
                       check(std::isfinite(s.data_scale) && s.data_scale >= 0,
                             "data_scale must be >= 0");
                       check(s.conv_rate >= 0 && s.conv_rate <= 1, "conv_rate must be in [0,1]");
                       check(std::isfinite(s.margin) && s.margin >= 0, "margin must be >= 0");
                       check(std::isfinite(s.nu) && s.nu >= 0, "nu must be >= 0");
                       check(s.q_bar >= 0 && s.q_bar <= 1, "q_bar must be in [0,1]");
                   },
                   [](const Capped& s) {
                       check(s.inner != nullptr, "capped spec needs an inner spec");
                       check(std::isfinite(s.cap) && s.cap >= 0, "cap must be >= 0");
                       validate(*s.inner);
                   },
               },
               spec.v);
}

std::string kind_name(const ComplementaritySpec& spec) {
    static const char* names[] = {"zero", "power_affine", "logistic", "channels", "capped"};
    return names[spec.v.index()];
}

double psi_value(const ComplementaritySpec& spec, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("psi_value: q outside [0,1]");
    return value_unchecked(spec, q);
}

Marginal psi_marginal_ex(const ComplementaritySpec& spec, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("psi_marginal: q outside [0,1]");
    return std::visit(
        overloaded{
            [](const Zero&) { return Marginal{}; },
            [q](const PowerAffine& s) {
                return Marginal{s.lin + s.coef * s.exp * std::pow(q, s.exp - 1.0)};
            },
            [q](const Logistic& s) {
                double g = sigmoid(s.steepness * (q - s.midpoint));
                return Marginal{s.scale * s.steepness * g * (1.0 - g)};
            },
            [q](const Channels& s) {
                return Marginal{2.0 * s.data_scale * q + s.conv_rate * s.margin + s.nu * s.q_bar};
            },
            [q](const Capped& s) {
                double inner = value_unchecked(*s.inner, q);
                double tol = 1e-12 * std::max(1.0, s.cap);
                if (inner < s.cap - tol) return psi_marginal_ex(*s.inner, q);
                if (inner > s.cap + tol) return Marginal{};
                return Marginal{psi_marginal_ex(*s.inner, q).value, true};
            },
        },
        spec.v);
}

ComplementaritySpec scale_spec(const ComplementaritySpec& spec, double f) {
    return std::visit(
        overloaded{
            [](const Zero& s) { return ComplementaritySpec{s}; },
            [f](PowerAffine s) {
                s.lin *= f;
                s.coef *= f;
                return ComplementaritySpec{s};
            },
            [f](Logistic s) {
                s.scale *= f;
                return ComplementaritySpec{s};
            },
            [f](Channels s) {
                s.data_scale *= f;
                s.margin *= f;
                s.nu *= f;
                return ComplementaritySpec{s};
            },
            [f](const Capped& s) { return make_capped(scale_spec(*s.inner, f), s.cap * f); },
        },
        spec.v);
}

namespace {

// Second differences at interior grid points; sign 0 inside rounding noise.
std::vector<int> curvature_signs(const ComplementaritySpec& spec, int n) {
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = static_cast<double>(i) / (n - 1);
        y[i] = value_unchecked(spec, x[i]);
    }
    std::vector<int> sign(n, 0);
    for (int i = 1; i + 1 < n; ++i) {
        double d2 = y[i - 1] - 2.0 * y[i] + y[i + 1];
        double noise = 64.0 * DBL_EPSILON * (std::abs(y[i - 1]) + 2 * std::abs(y[i]) +
                                             std::abs(y[i + 1]));
        sign[i] = d2 > noise ? 1 : (d2 < -noise ? -1 : 0);
    }
    return sign;
}

}  // namespace

std::vector<Interval> convexity_region(const ComplementaritySpec& spec, int grid_n) {
    if (grid_n < 16) throw InvalidInput("convexity_region: grid_n must be >= 16");
    auto sign = curvature_signs(spec, grid_n);
    double h = 1.0 / (grid_n - 1);
    std::vector<Interval> out;
    int i = 1;
    while (i + 1 < grid_n) {
        if (sign[i] != 1) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < grid_n - 1 && sign[j + 1] == 1) ++j;
        out.push_back({(i - 1) * h, (j + 1) * h});
        i = j + 1;
    }
    return out;
}

RegularityReport check_regularity(const ComplementaritySpec& spec) {
    const int n = 1001;
    RegularityReport r;
    bool finite = true, nondecreasing = true;
    double prev = value_unchecked(spec, 0.0);
    for (int i = 0; i < n; ++i) {
        double y = value_unchecked(spec, static_cast<double>(i) / (n - 1));
        finite = finite && std::isfinite(y);
        if (i > 0 && y < prev - 1e-14 * std::max(1.0, std::abs(prev))) nondecreasing = false;
        prev = y;
    }
    r.bounded = finite;
    r.increasing = nondecreasing && value_unchecked(spec, 1.0) > value_unchecked(spec, 0.0);
    r.locally_convex_somewhere = !convexity_region(spec, n).empty();
    auto sign = curvature_signs(spec, n);
    // Strictly concave on a terminal block (q_bar, 1).
    int k = n - 2;
    while (k >= 1 && sign[k] == -1) --k;
    r.eventually_concave = k < n - 2;
    return r;
}

}  // namespace ecosub
