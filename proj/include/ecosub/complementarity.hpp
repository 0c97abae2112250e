#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ecosub {

struct ComplementaritySpec;

// Psi(q) = lin*q + coef*q^exp
struct PowerAffine {
    double lin = 0.0;
    double coef = 0.0;
    double exp = 2.0;
};

// Logistic curve shifted so that Psi(0) = 0.
struct Logistic {
    double scale = 1.0;
    double steepness = 10.0;
    double midpoint = 0.5;
};

// data_scale*q^2 + conv_rate*margin*q + nu*q*q_bar
struct Channels {
    double data_scale = 0.0;
    double conv_rate = 0.0;
    double margin = 0.0;
    double nu = 0.0;
    double q_bar = 0.0;
};

struct Capped {
    std::shared_ptr<const ComplementaritySpec> inner;
    double cap = 0.0;
};

struct Zero {};

struct ComplementaritySpec {
    std::variant<Zero, PowerAffine, Logistic, Channels, Capped> v;

    ComplementaritySpec() = default;
    template <class T>
    ComplementaritySpec(T x) : v(std::move(x)) {}
};

ComplementaritySpec make_capped(const ComplementaritySpec& inner, double cap);

// Throws InvalidInput on a parameter outside its documented range.
void validate(const ComplementaritySpec& spec);

std::string kind_name(const ComplementaritySpec& spec);

// Psi(q); q outside [0,1] raises DomainError.
double psi_value(const ComplementaritySpec& spec, double q);

struct Marginal {
    double value = 0.0;
    bool one_sided = false;  // evaluated at a Capped kink (left derivative)
};

Marginal psi_marginal_ex(const ComplementaritySpec& spec, double q);
inline double psi_marginal(const ComplementaritySpec& spec, double q) {
    return psi_marginal_ex(spec, q).value;
}

// Same function times factor; Capped scales its cap too.
ComplementaritySpec scale_spec(const ComplementaritySpec& spec, double factor);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Maximal subintervals of (0,1) with positive numerical second difference.
std::vector<Interval> convexity_region(const ComplementaritySpec& spec, int grid_n);

struct RegularityReport {
    bool bounded = false;
    bool increasing = false;
    bool locally_convex_somewhere = false;
    bool eventually_concave = false;
};

RegularityReport check_regularity(const ComplementaritySpec& spec);

}  // namespace ecosub
