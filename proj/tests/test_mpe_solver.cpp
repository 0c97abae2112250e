#include <cmath>

#include "doctest.h"
#include "ecosub/errors.hpp"
#include "ecosub/mpe_solver.hpp"
#include "ecosub/properties.hpp"
#include "ecosub/quadrature.hpp"
#include "helpers.hpp"

using namespace ecosub;
using testutil::small_solver;

namespace {

ModelParams smooth_params() {
    ModelParams p;
    p.sigma = 0.1;
    p.franchise = 0.1;
    p.subsidy_curvature = 32;
    p.s_max = 0.5;
    return p;
}

const ComplementaritySpec kSpec = PowerAffine{0.05, 0.1, 2.0};

}  // namespace

TEST_CASE("entrant one-shot operator attains the ecosystem flow at zero subsidy") {
    ModelParams p;
    SolverConfig c = small_solver();
    const double L = 0.3;
    std::vector<double> zero(c.grid_n, 0.0);
    auto r = bellman_entrant(p, PowerAffine{L, 0.0, 2.0}, zero, zero, c);
    UniformGrid g{0.0, 1.0, c.grid_n};
    for (int i = 0; i < c.grid_n; ++i) {
        CHECK(r.value[i] >= L * (1.0 - g.at(i)) - 1e-15);
        CHECK(r.policy[i] == 0.0);  // no continuation value, subsidies are pure cost
    }
    CHECK(r.value.back() == 0.0);
}

TEST_CASE("incumbent operator zeroes values below the survival threshold") {
    ModelParams p = smooth_params();
    SolverConfig c = small_solver();
    std::vector<double> v(c.grid_n, 5.0), s(c.grid_n, 0.1);
    auto r = bellman_incumbent(p, kSpec, v, s, c);
    UniformGrid g{0.0, 1.0, c.grid_n};
    for (int i = 0; i < c.grid_n; ++i) {
        if (g.at(i) < p.m_min) {
            CHECK(r.value[i] == 0.0);
            CHECK(r.policy[i] == 0.0);
        } else {
            CHECK(r.value[i] >= 0.0);
        }
    }
    auto raw = bellman_incumbent(p, kSpec, v, s, c, false);
    CHECK(raw.value[0] > 0.0);
}

TEST_CASE("operators reject arrays of the wrong size") {
    ModelParams p;
    SolverConfig c = small_solver();
    std::vector<double> shortv(10, 0.0), ok(c.grid_n, 0.0);
    CHECK_THROWS_AS(bellman_incumbent(p, kSpec, shortv, ok, c), InvalidInput);
    CHECK_THROWS_AS(bellman_entrant(p, kSpec, ok, shortv, c), InvalidInput);
}

TEST_CASE("degenerate game solves to zero") {
    ModelParams p;
    auto sol = solve_mpe(p, Zero{}, small_solver());
    CHECK(sol.converged);
    for (int i = 0; i < sol.grid.n; ++i) {
        CHECK(std::abs(sol.v_I[i]) <= 1e-8);
        CHECK(std::abs(sol.v_E[i]) <= 1e-8);
        CHECK(sol.s_I[i] == 0.0);
        CHECK(sol.s_E[i] == 0.0);
    }
    auto foc = foc_crosscheck(sol, p, Zero{}, small_solver());
    CHECK(foc.max_abs_gap_I == 0.0);
    CHECK(foc.max_abs_gap_E == 0.0);
    auto d = subsidization_diagnostics(sol, p);
    CHECK((!d.applicable || (d.profit_I == 0.0 && d.profit_E == 0.0)));
}

TEST_CASE("both expectation methods agree on smooth value arrays") {
    SolverConfig q = small_solver(), k = small_solver();
    q.quad_n = 20;
    k.expectation = Expectation::Convolution;
    UniformGrid g{0.0, 1.0, q.grid_n};
    std::vector<double> v;
    for (double x : g.points()) v.push_back(std::sin(3 * x) + x * x);
    ShockExpectation a(g, 0.05, q), b(g, 0.05, k);
    a.load(v);
    b.load(v);
    for (double x : {0.3, 0.5, 0.71})  // away from the clamped edges
        CHECK(a.at(x) == doctest::Approx(b.at(x)).epsilon(1e-4));
    // sigma = 0 is plain interpolation
    ShockExpectation z(g, 0.0, q);
    z.load(v);
    CHECK(z.at(0.505) == doctest::Approx(interp(g, v, 0.505)));
}

TEST_CASE("convolution expectation of an affine array is the clamped mean") {
    SolverConfig k = small_solver();
    k.expectation = Expectation::Convolution;
    UniformGrid g{0.0, 1.0, k.grid_n};
    std::vector<double> v = g.points();  // v(x) = x
    ShockExpectation e(g, 0.02, k);
    e.load(v);
    // far from the edges E[x + sigma Z] = x
    CHECK(e.at(0.5) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("smooth calibration converges with positive subsidies and an interior steady state") {
    ModelParams p = smooth_params();
    SolverConfig c;
    c.expectation = Expectation::Convolution;
    auto sol = solve_mpe(p, kSpec, c);
    REQUIRE(sol.converged);
    CHECK(sol.final_residual < c.tol);
    REQUIRE(sol.m_star);
    CHECK(*sol.m_star > p.m_min);
    CHECK(*sol.m_star < 1.0 - p.m_min);
    // geometric rate: iterations bounded by log(tol / initial) / log(delta) plus a margin
    double initial = 1.0 / (1.0 - p.delta);
    double bound = std::ceil(std::log(c.tol / initial) / std::log(p.delta));
    CHECK(sol.iterations <= bound + 100);
    for (int i = 0; i < sol.grid.n; ++i)
        if (sol.grid.at(i) < p.m_min) CHECK(sol.v_I[i] == 0.0);
    auto d = subsidization_diagnostics(sol, p);
    CHECK(d.applicable);
    CHECK(d.profits_negative);
    CHECK(d.effective_price_I < p.cost);
}

TEST_CASE("entrant value with a nonnegative spec dominates the zero-spec value") {
    ModelParams p = smooth_params();
    SolverConfig c = small_solver();
    c.expectation = Expectation::Convolution;
    auto with = solve_mpe(p, kSpec, c);
    auto without = solve_mpe(p, Zero{}, c);
    for (int i = 0; i < c.grid_n; ++i) CHECK(with.v_E[i] >= without.v_E[i] - 1e-12);
}

TEST_CASE("steady states are sign changes of the subsidy gap") {
    EquilibriumSolution s = testutil::make_solution(
        101, [](double m) { return 0.5 - m; }, [](double) { return 0.0; },
        [](double) { return 0.0; }, [](double) { return 0.0; });
    ModelParams p;
    auto ss = find_steady_states(s, p);
    REQUIRE(ss.size() == 1);
    CHECK(ss[0].m == doctest::Approx(0.5));
    CHECK(ss[0].stable);
    // the stable crossing with the wider basin wins
    std::vector<SteadyState> all{{0.4, true}, {0.5, false}, {0.8, true}};
    CHECK(*pick_steady_state(all) == doctest::Approx(0.4));
    CHECK_FALSE(pick_steady_state({{0.5, false}}));
}

TEST_CASE("a flat stretch at the bottom with downward drift above is a rest point") {
    // entrant stops subsidizing below 0.2 and the incumbent never does
    EquilibriumSolution s = testutil::make_solution(
        101, [](double) { return 0.0; }, [](double m) { return m > 0.205 ? 0.05 : 0.0; },
        [](double) { return 0.0; }, [](double) { return 0.0; });
    auto ss = find_steady_states(s, ModelParams{});
    REQUIRE(ss.size() == 1);
    CHECK(ss[0].m == doctest::Approx(0.2));
    CHECK(ss[0].stable);
    // mirrored at the top
    EquilibriumSolution t = testutil::make_solution(
        101, [](double m) { return m < 0.795 ? 0.05 : 0.0; }, [](double) { return 0.0; },
        [](double) { return 0.0; }, [](double) { return 0.0; });
    auto st = find_steady_states(t, ModelParams{});
    REQUIRE(st.size() == 1);
    CHECK(st[0].m == doctest::Approx(0.8));
}

TEST_CASE("operator properties on random instances") {
    ModelParams p = smooth_params();
    SolverConfig c = small_solver();
    c.expectation = Expectation::Convolution;
    CHECK(contraction_ratio(p, kSpec, c, 20, 3) <= p.delta + 1e-9);
    auto props = operator_properties(p, kSpec, c, 5, 4);
    CHECK(props.monotone);
    CHECK(props.shift_error <= 64 * 2.2e-16 * std::max(1.0, props.shift_scale));
    SolverConfig gh = small_solver();
    CHECK(contraction_ratio(p, kSpec, gh, 20, 5) <= p.delta + 1e-9);
    CHECK(operator_properties(p, kSpec, gh, 5, 6).monotone);
}

TEST_CASE("solver configuration validation") {
    SolverConfig c;
    c.grid_n = 10;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = SolverConfig{};
    c.relaxation = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = SolverConfig{};
    c.stage_rounds = 0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("non-convergence is reported, not hidden") {
    ModelParams p = smooth_params();
    SolverConfig c = small_solver();
    c.max_iter = 3;
    auto sol = solve_mpe(p, kSpec, c);
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 3);
    CHECK(sol.final_residual >= c.tol);
}
