#include "doctest.h"

#include <cmath>
#include <vector>

#include "dualrisk/errors.hpp"
#include "dualrisk/numerics.hpp"

using namespace dualrisk;
using num::ExtReal;

TEST_CASE("extended reals reject NaN and -inf at the boundary") {
    CHECK_THROWS_AS(ExtReal::of(std::nan("")), non_finite);
    CHECK_THROWS_AS(ExtReal::of(-std::numeric_limits<double>::infinity()), non_finite);
    CHECK(ExtReal::of(0.0).finite());
    CHECK(ExtReal::inf().is_inf());
}

TEST_CASE("extended-real reciprocal uses the 1/0 = inf and 1/inf = 0 conventions") {
    CHECK(ExtReal::of(0.0).recip().is_inf());
    CHECK(ExtReal::inf().recip().get() == 0.0);
    CHECK(ExtReal::of(4.0).recip().get() == doctest::Approx(0.25));
    CHECK_THROWS_AS(ExtReal::of(-1.0).recip(), domain_error);
}

TEST_CASE("extended-real arithmetic absorbs infinity and keeps 0 * inf = 0") {
    CHECK((ExtReal::of(1.0) + ExtReal::inf()).is_inf());
    CHECK((ExtReal::of(1.5) + ExtReal::of(2.5)).get() == 4.0);
    CHECK((0.0 * ExtReal::inf()).get() == 0.0);
    CHECK((2.0 * ExtReal::inf()).is_inf());
    CHECK((0.5 * ExtReal::of(3.0)).get() == 1.5);
    CHECK_THROWS_AS(-1.0 * ExtReal::inf(), domain_error);
    CHECK(ExtReal::of(1.0) < ExtReal::inf());
    CHECK(ExtReal::inf() >= ExtReal::inf());
}

TEST_CASE("guarded exponential overflows to +inf past 700 log units") {
    CHECK(num::exp_guarded(800.0).is_inf());
    CHECK(num::exp_guarded(0.0).get() == 1.0);
    CHECK(num::exp_guarded(-std::numeric_limits<double>::infinity()).get() == 0.0);
    CHECK_THROWS_AS(num::exp_guarded(std::nan("")), non_finite);
}

TEST_CASE("monotone-predicate bisection finds the switch point") {
    auto r = num::find_root_monotone([](double a) { return a <= M_PI; }, {0.0, 10.0}, 1e-12);
    CHECK(r.root == doctest::Approx(M_PI).epsilon(1e-11));
    CHECK(r.last_true <= r.last_false);
    CHECK(!r.degenerate);
}

TEST_CASE("monotone bisection rejects brackets that do not straddle the switch") {
    CHECK_THROWS_AS(
        num::find_root_monotone([](double) { return true; }, {0.0, 1.0}, 1e-10),
        invalid_bracket);
    CHECK_THROWS_AS(
        num::find_root_monotone([](double) { return false; }, {0.0, 1.0}, 1e-10),
        invalid_bracket);
}

TEST_CASE("continuous root finder converges on smooth functions") {
    auto r = num::find_root_continuous([](double x) { return x * x - 2.0; }, {0.0, 2.0}, 1e-13);
    CHECK(r.root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::fabs(r.f_root) < 1e-10);
}

TEST_CASE("continuous root finder tolerates infinite endpoint values") {
    auto r = num::find_root_continuous([](double x) { return std::log(x); }, {0.0, 2.0}, 1e-12);
    CHECK(r.root == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("continuous root finder rejects NaN and same-sign brackets") {
    CHECK_THROWS_AS(num::find_root_continuous([](double) { return std::nan(""); },
                                              {0.0, 1.0}, 1e-10),
                    non_finite);
    CHECK_THROWS_AS(num::find_root_continuous([](double x) { return x + 1.0; },
                                              {0.0, 1.0}, 1e-10),
                    no_sign_change);
}

TEST_CASE("Lambert W matches the defining identity") {
    CHECK(num::lambert_w(0.0) == 0.0);
    CHECK(num::lambert_w(1.0) == doctest::Approx(0.567143290409783873).epsilon(1e-14));
    CHECK(num::lambert_w(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-13));
    for (double z : {0.03, 0.7, 5.0, 100.0, 1e6}) {
        double w = num::lambert_w(z);
        CHECK(w * std::exp(w) == doctest::Approx(z).epsilon(1e-12));
    }
    CHECK_THROWS_AS(num::lambert_w(-0.1), domain_error);
}

TEST_CASE("log-space Lambert W handles arguments too large to exponentiate") {
    for (double ln_z : {1.0, 50.0, 710.0, 5000.0}) {
        double w = num::lambert_w_ln(ln_z);
        CHECK(w + std::log(w) == doctest::Approx(ln_z).epsilon(1e-12));
    }
}

TEST_CASE("Gauss-Hermite rules integrate standard-normal moments") {
    const auto& rule = num::QuadratureRule::gauss_hermite(64);
    REQUIRE(rule.nodes.size() == 64);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        m0 += rule.weights[i];
        m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
        m4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
    for (std::size_t i = 0; i + 1 < rule.nodes.size(); ++i)
        CHECK(rule.nodes[i] < rule.nodes[i + 1]);
    // symmetry about zero
    CHECK(rule.nodes.front() == doctest::Approx(-rule.nodes.back()).epsilon(1e-15));
}

TEST_CASE("Gauss-Hermite expectation evaluates lognormal means") {
    const auto& rule = num::QuadratureRule::gauss_hermite(64);
    auto v = num::gauss_expectation([](double z) { return std::exp(z); }, rule);
    CHECK(v.get() == doctest::Approx(std::exp(0.5)).epsilon(1e-12));

    auto inf = num::gauss_expectation(
        [](double z) { return z > 3.0 ? std::numeric_limits<double>::infinity() : 0.0; },
        rule);
    CHECK(inf.is_inf());
    CHECK_THROWS_AS(num::gauss_expectation([](double) { return std::nan(""); }, rule),
                    non_finite);
}

TEST_CASE("checked expectation reports agreement between n and 2n nodes") {
    auto r = num::gauss_expectation_checked([](double z) { return std::exp(0.3 * z); }, 64);
    CHECK(r.converged);
    CHECK(r.value.get() == doctest::Approx(std::exp(0.045)).epsilon(1e-10));
}

TEST_CASE("exponentially damped power sums match high-precision references") {
    struct Row {
        double p, eps, want;
    };
    // sum_{n>=1} n^{-p} e^{-eps n}, 25-digit references
    const Row rows[] = {
        {2.0, 1e-6, 1.6449192513374184722},
        {2.0, 1e-10, 1.6449340644456413435},
        {2.0, 0.0, 1.6449340668482264365},
        {2.0, 5e-4, 1.6406335531201915064},
        {0.5, 1e-4, 175.78505137023708622},
        {0.5, 1e-8, 17723.078154548429548},
        {1.0, 0.01, 4.6101660193248969181},
        {1.0, 1e-5, 11.512930464966061753},
        {3.5, 1e-7, 1.1267337331683439802},
        {0.0, 0.001, 999.50008333333194444},
        {5.5, 0.0, 1.0252045799546856946},
        {1.7, 3e-4, 2.0405076962425484754},
    };
    for (const auto& row : rows) {
        auto s = num::exp_power_tail_sum(row.p, row.eps);
        REQUIRE(s.finite());
        CHECK(s.get() == doctest::Approx(row.want).epsilon(1e-12));
    }
}

TEST_CASE("damped power sums diverge exactly when they should") {
    CHECK(num::exp_power_tail_sum(2.0, -1e-12).is_inf());
    CHECK(num::exp_power_tail_sum(1.0, 0.0).is_inf());
    CHECK(num::exp_power_tail_sum(0.5, 0.0).is_inf());
    CHECK(num::exp_power_tail_sum(1.0 + 1e-9, 0.0).finite());
    CHECK_THROWS_AS(num::exp_power_tail_sum(-2.5, 1.0), domain_error);
}

TEST_CASE("panel Gauss-Legendre integrates smooth functions") {
    double s = num::gauss_legendre([](double x) { return std::sin(x); }, 0.0, M_PI, 4);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
    double g = num::gauss_legendre([](double x) { return std::exp(-x * x); }, -6.0, 6.0, 8);
    CHECK(g == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}
