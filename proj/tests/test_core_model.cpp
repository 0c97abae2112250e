#include "doctest.h"
#include "ecosub/core_model.hpp"
#include "ecosub/errors.hpp"

using namespace ecosub;

TEST_CASE("next_share moves toward the firm that subsidizes more") {
    ModelParams p;
    CHECK(next_share(p, 0.5, 0.0, 0.0, 1.0, 1.0, 0.0) == doctest::Approx(0.5));
    // entrant subsidy pulls share away from the incumbent
    CHECK(next_share(p, 0.5, 0.0, 0.1, 1.0, 1.0, 0.0) == doctest::Approx(0.44));
    CHECK(next_share(p, 0.5, 0.1, 0.0, 1.0, 1.0, 0.0) == doctest::Approx(0.56));
    CHECK(next_share(p, 0.5, 0.0, 0.0, 1.0, 1.0, 0.05) == doctest::Approx(0.55));
}

TEST_CASE("posted prices enter with weight kappa") {
    ModelParams p;
    p.kappa = 2.0;
    // a higher incumbent price loses share
    CHECK(next_share(p, 0.5, 0.0, 0.0, 1.1, 1.0, 0.0) == doctest::Approx(0.5 - 0.6 * 2.0 * 0.1));
}

TEST_CASE("next_share is clamped to the unit interval") {
    ModelParams p;
    CHECK(next_share(p, 0.99, 2.0, 0.0, 1.0, 1.0, 0.0) == 1.0);
    CHECK(next_share(p, 0.01, 0.0, 2.0, 1.0, 1.0, 0.0) == 0.0);
    CHECK(next_share(p, 0.5, 0.0, 0.0, 1.0, 1.0, -3.0) == 0.0);
}

TEST_CASE("primary profit is margin times own demand") {
    ModelParams p;
    CHECK(primary_profit(p, 0.6, Firm::Incumbent, 1.0, 0.1) == doctest::Approx(-0.06));
    CHECK(primary_profit(p, 0.6, Firm::Entrant, 1.0, 0.1) == doctest::Approx(-0.04));
    CHECK(primary_profit(p, 0.6, Firm::Entrant, 1.5, 0.0) == doctest::Approx(0.2));
    CHECK(primary_profit(p, 0.6, Firm::Incumbent, 1.0, 0.0) == 0.0);
}

TEST_CASE("parameter validation names the field") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    auto bad = [](auto mutate) {
        ModelParams q;
        mutate(q);
        return q;
    };
    CHECK_THROWS_WITH_AS(bad([](ModelParams& q) { q.m_min = 0.5; }).validate(),
                         doctest::Contains("m_min"), InvalidInput);
    CHECK_THROWS_WITH_AS(bad([](ModelParams& q) { q.delta = 1.0; }).validate(),
                         doctest::Contains("delta"), InvalidInput);
    CHECK_THROWS_WITH_AS(bad([](ModelParams& q) { q.gamma = 0.0; }).validate(),
                         doctest::Contains("gamma"), InvalidInput);
    CHECK_THROWS_WITH_AS(bad([](ModelParams& q) { q.sigma = -0.1; }).validate(),
                         doctest::Contains("sigma"), InvalidInput);
    CHECK_THROWS_AS(bad([](ModelParams& q) { q.s_max = 0.0; }).validate(), InvalidInput);
}
