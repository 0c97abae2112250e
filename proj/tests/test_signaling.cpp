#include "doctest.h"
#include "ecosub/errors.hpp"
#include "ecosub/signaling.hpp"
#include "helpers.hpp"

using namespace ecosub;

namespace {

ModelParams params() {
    ModelParams p;
    p.sigma = 0.1;
    p.franchise = 0.1;
    p.subsidy_curvature = 32;
    p.s_max = 0.5;
    return p;
}

SolverConfig solver() {
    SolverConfig c = testutil::small_solver();
    c.expectation = Expectation::Convolution;
    return c;
}

}  // namespace

TEST_CASE("types must be ordered") {
    TypeSpace t{PowerAffine{0.1, 0.1, 2.0}, Zero{}, 0.5};
    CHECK_THROWS_AS(t.validate(), InvalidInput);
    t = {Zero{}, PowerAffine{0.1, 0.1, 2.0}, 1.5};
    CHECK_THROWS_AS(t.validate(), InvalidInput);
}

TEST_CASE("a zero low type against a strong high type separates") {
    ModelParams p = params();
    SolverConfig c = solver();
    TypeSpace t{Zero{}, PowerAffine{0.2, 0.4, 2.0}, 0.5};
    auto b = type_benchmarks(t, p, c);
    auto o = separating_threshold(t, p, b, c, 0.6);
    CHECK(o.separating);
    CHECK(o.ic_slack_low >= -1e-8);
    CHECK(o.ic_slack_high > 1e-8);
    CHECK(o.s_low < o.threshold);
    CHECK(o.threshold <= o.s_high);
    auto prem = signaling_premium(o);
    REQUIRE(prem);
    CHECK(*prem >= 0.0);
}

TEST_CASE("identical types cannot separate") {
    ModelParams p = params();
    SolverConfig c = solver();
    ComplementaritySpec s = PowerAffine{0.05, 0.1, 2.0};
    TypeSpace t{s, s, 0.5};
    auto b = type_benchmarks(t, p, c);
    auto o = separating_threshold(t, p, b, c, 0.6);
    CHECK_FALSE(o.separating);
    CHECK_FALSE(o.diagnostic.empty());
    CHECK_FALSE(signaling_premium(o));
}

TEST_CASE("signal payoff evaluates the one-shot formula") {
    ModelParams p;
    auto sol = testutil::make_solution(
        101, [](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
        [](double m) { return 1.0 - m; });
    ComplementaritySpec s = PowerAffine{0.1, 0.0, 2.0};
    // m' = 0.5 + 0.6 (0.1 - 0.2) = 0.44
    double expect = -0.2 * 0.5 + 0.1 * 0.56 + p.delta * 0.56;
    CHECK(signal_payoff(p, s, sol, 0.1, 0.5, 0.2) == doctest::Approx(expect));
}
