#include "doctest.h"

#include <cmath>

#include "dualrisk/errors.hpp"
#include "dualrisk/market.hpp"

using namespace dualrisk;
using mkt::Market;

TEST_CASE("lognormal kernel normalizes to unit price of the bond") {
    auto m = Market::lognormal(1.0);
    CHECK(m.kind() == Market::Kind::Lognormal);
    CHECK(m.sigma2() == 1.0);
    CHECK(m.entropy() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.log_mean() == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(m.ess_inf() == 0.0);
    CHECK(m.expect([](double r) { return r; }).get() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.expect([](double) { return 1.0; }).get() == doctest::Approx(1.0).epsilon(1e-13));
    // quadrature consistency with the closed-form entropy
    CHECK(m.expect_rho([](double r) { return std::log(r); }).get() ==
          doctest::Approx(0.5).epsilon(1e-9));
    CHECK(m.rho_of_z(0.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(m.rho_of_z(1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
}

TEST_CASE("lognormal kernel validates its parameters") {
    CHECK_THROWS_AS(Market::lognormal(0.0), invalid_market);
    CHECK_THROWS_AS(Market::lognormal(-1.0), invalid_market);
    CHECK_THROWS_AS(Market::lognormal(1.0, 7), invalid_market);   // below minimum
    CHECK_THROWS_AS(Market::lognormal(1.0, 65), invalid_market);  // odd
    CHECK_THROWS_AS(Market::lognormal(1.0, 4098), invalid_market);
    CHECK_THROWS_AS(Market::discrete({{1.0, 1.0}}).sigma2(), domain_error);
    CHECK_THROWS_AS(Market::lognormal(1.0).atoms(), domain_error);
    CHECK_THROWS_AS(Market::discrete({{1.0, 1.0}}).rho_of_z(0.0), domain_error);
}

TEST_CASE("two-state kernel matches its closed-form entropy") {
    auto m = Market::discrete({{0.5, 0.5}, {1.5, 0.5}});
    CHECK(m.kind() == Market::Kind::Discrete);
    CHECK(m.entropy() == doctest::Approx(0.13081203594113695913).epsilon(1e-14));
    CHECK(m.log_mean() == doctest::Approx(-0.14384103622589046372).epsilon(1e-14));
    CHECK(m.ess_inf() == 0.5);
    CHECK(m.expect([](double r) { return r; }).get() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.expect_rho([](double r) { return r; }).get() ==
          doctest::Approx(0.5 * 0.25 + 0.5 * 2.25).epsilon(1e-15));
}

TEST_CASE("riskless kernel has zero entropy") {
    auto m = Market::discrete({{1.0, 1.0}});
    CHECK(m.entropy() == 0.0);
    CHECK(m.log_mean() == 0.0);
    CHECK(m.ess_inf() == 1.0);
}

TEST_CASE("discrete kernels must price the bond at par") {
    // E[rho] = 0.95: a renormalization here would change prices, so it throws
    CHECK_THROWS_AS(Market::discrete({{0.5, 0.5}, {1.4, 0.5}}), invalid_market);
    CHECK_THROWS_AS(Market::discrete({{2.0, 1.0}}), invalid_market);
    // tiny probability slack is repaired, values never are
    auto m = Market::discrete({{0.5, 0.5}, {1.5, 0.5 + 4e-10}});
    CHECK(m.atoms().size() == 2);
    double p = 0.0;
    for (const auto& a : m.atoms()) p += a.prob;
    CHECK(p == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("discrete kernels reject non-positive prices and bad masses") {
    CHECK_THROWS_AS(Market::discrete({{0.0, 0.5}, {2.0, 0.5}}), invalid_market);
    CHECK_THROWS_AS(Market::discrete({{-1.0, 0.5}, {3.0, 0.5}}), invalid_market);
    CHECK_THROWS_AS(Market::discrete({}), invalid_market);
    CHECK_THROWS_AS(Market::discrete({{1.0, 0.7}, {1.5, 0.7}}), invalid_market);
}

TEST_CASE("expectations propagate +inf and reject NaN") {
    auto m = Market::discrete({{0.5, 0.5}, {1.5, 0.5}});
    auto v = m.expect([](double r) {
        return r < 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
    });
    CHECK(v.is_inf());
    CHECK_THROWS_AS(m.expect([](double) { return std::nan(""); }), non_finite);

    auto ln = Market::lognormal(0.25, 64);
    auto w = ln.expect([](double r) {
        return r > 3.0 ? std::numeric_limits<double>::infinity() : 1.0;
    });
    CHECK(w.is_inf());
}

TEST_CASE("atoms are sorted and merged like outcome laws") {
    auto m = Market::discrete({{1.5, 0.25}, {0.5, 0.5}, {1.5, 0.25}});
    REQUIRE(m.atoms().size() == 2);
    CHECK(m.atoms()[0].value == 0.5);
    CHECK(m.atoms()[1].value == 1.5);
    CHECK(m.atoms()[1].prob == doctest::Approx(0.5).epsilon(1e-15));
}
