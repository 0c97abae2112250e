#include <cmath>

#include "doctest.h"
#include "ecosub/bifurcation.hpp"
#include "ecosub/errors.hpp"
#include "helpers.hpp"

using namespace ecosub;

TEST_CASE("critical threshold closed form") {
    ModelParams p;
    // (1 - 0.95) / (0.95 * 0.36) = 5 / 34.2, evaluated by hand
    CHECK(critical_threshold(p) == doctest::Approx(5.0 / 34.2).epsilon(1e-15));
    CHECK(std::abs(critical_threshold(p) - 0.146199) < 1e-6);
    ModelParams q = p;
    q.delta = 0.97;
    CHECK(critical_threshold(q) < critical_threshold(p));
    q = p;
    q.gamma = 0.7;
    CHECK(critical_threshold(q) < critical_threshold(p));
}

TEST_CASE("threshold crossing matches the analytic root") {
    ModelParams p;
    const double psi_star = critical_threshold(p);
    // psi(q) = lin + 2 coef q  =>  q = (psi* - lin) / (2 coef)
    PowerAffine pa{0.05, 0.1, 2.0};
    auto c = threshold_crossing(pa, p);
    REQUIRE(c.q);
    CHECK(*c.q == doctest::Approx((psi_star - 0.05) / 0.2).epsilon(1e-6));
    CHECK_FALSE(c.multiple);
    auto above = threshold_crossing(PowerAffine{0.5, 0.1, 2.0}, p);
    CHECK_FALSE(above.q);
    CHECK(above.always_above);
    auto below = threshold_crossing(PowerAffine{0.0, 0.01, 2.0}, p);
    CHECK_FALSE(below.q);
    CHECK(below.always_below);
}

TEST_CASE("logistic crossing lies in the convex part") {
    ModelParams p;
    Logistic lg{1.0, 10.0, 0.5};
    auto c = threshold_crossing(lg, p);
    REQUIRE(c.q);
    CHECK(*c.q < 0.5);
    CHECK(psi_marginal(lg, *c.q) == doctest::Approx(critical_threshold(p)).epsilon(1e-6));
}

TEST_CASE("parameter paths") {
    ModelPoint base{ModelParams{}, PowerAffine{0.05, 0.1, 2.0}};
    auto f = apply_parameter(base, "psi.factor", 2.0);
    CHECK(psi_value(f.spec, 0.5) == doctest::Approx(2.0 * psi_value(base.spec, 0.5)));
    auto l = apply_parameter(base, "psi.lin", 0.3);
    CHECK(std::get<PowerAffine>(l.spec.v).lin == 0.3);
    auto m = apply_parameter(base, "model.m_min", 0.2);
    CHECK(m.params.m_min == 0.2);
    CHECK(apply_parameter(base, "model.delta", 0.9).params.delta == 0.9);
    ModelPoint capped{ModelParams{}, make_capped(PowerAffine{0.05, 0.1, 2.0}, 0.1)};
    auto ci = apply_parameter(capped, "psi.coef", 0.4);
    CHECK(psi_value(ci.spec, 0.1) == doctest::Approx(0.005 + 0.004));
    CHECK(std::get<Capped>(apply_parameter(capped, "psi.cap", 0.2).spec.v).cap == 0.2);
    CHECK_THROWS_AS(apply_parameter(base, "psi.steepness", 1.0), InvalidInput);
    CHECK_THROWS_AS(apply_parameter(base, "model.nope", 1.0), InvalidInput);
    CHECK_THROWS_AS(apply_parameter(base, "bogus", 1.0), InvalidInput);
}

TEST_CASE("sweep spec values and validation") {
    SweepSpec s{"psi.factor", 1.0, 2.0, 11, SweepDirection::Both};
    CHECK(s.value(0) == 1.0);
    CHECK(s.value(10) == 2.0);
    CHECK(s.value(5) == doctest::Approx(1.5));
    s.steps = 1;
    CHECK_THROWS_AS(s.validate(), InvalidInput);
    s = {"psi.factor", 2.0, 1.0, 5, SweepDirection::Up};
    CHECK_THROWS_AS(s.validate(), InvalidInput);
}

TEST_CASE("stability coefficient of affine policies") {
    ModelParams p;
    auto sol = testutil::make_solution(
        201, [](double m) { return 0.3 - 0.2 * m; }, [](double m) { return 0.1 + 0.2 * m; },
        [](double) { return 0.0; }, [](double) { return 0.0; });
    sol.m_star = 0.5;
    auto r = stability_coefficient(sol, p);
    CHECK(r.dsI == doctest::Approx(-0.2));
    CHECK(r.dsE == doctest::Approx(0.2));
    CHECK(r.rho == doctest::Approx(1.0 - 0.6 * 0.4));
    CHECK_FALSE(r.one_sided);
    sol.m_star = 0.36;  // stencil would cross m_min
    CHECK(stability_coefficient(sol, p).one_sided);
    sol.m_star.reset();
    CHECK_THROWS_AS(stability_coefficient(sol, p), DomainError);
}

TEST_CASE("region classes") {
    ModelParams p;
    ModelPoint pt{p, PowerAffine{0.05, 0.1, 2.0}};
    auto sol = testutil::make_solution(
        101, [](double) { return 0.0; }, [](double) { return 0.1; }, [](double) { return 0.0; },
        [](double) { return 0.0; });
    CHECK(classify(sol, pt) == RegionClass::IncumbentExit);
    sol.converged = false;
    CHECK(classify(sol, pt) == RegionClass::NonConverged);
    sol.converged = true;
    sol.m_star = 0.9;  // psi(0.1) = 0.07 < psi*
    CHECK(classify(sol, pt) == RegionClass::LowSubsidy);
    sol.m_star = 0.4;  // psi(0.6) = 0.17 > psi*
    CHECK(classify(sol, pt) == RegionClass::HighSubsidy);
    sol.m_star = 0.1;  // rest point after the incumbent left
    CHECK(classify(sol, pt) == RegionClass::IncumbentExit);
    CHECK(class_name(RegionClass::HighSubsidy) == "high-subsidy");
}

TEST_CASE("small sweep runs both directions and tracks branches") {
    ModelParams p;
    p.sigma = 0.1;
    p.franchise = 0.1;
    p.subsidy_curvature = 32;
    p.s_max = 0.5;
    SolverConfig c = testutil::small_solver();
    c.expectation = Expectation::Convolution;
    SweepSpec s{"psi.factor", 0.8, 1.2, 5, SweepDirection::Both};
    auto d = sweep_bifurcation(p, PowerAffine{0.05, 0.1, 2.0}, s, c);
    REQUIRE(d.points.size() == 10);
    CHECK(d.points[0].ascending);
    CHECK(d.points[0].param == 0.8);
    CHECK_FALSE(d.points[5].ascending);
    CHECK(d.points[5].param == 1.2);
    for (const auto& pt : d.points) {
        CHECK(pt.converged);
        CHECK((pt.branch == "low" || pt.branch == "high"));
    }
}
