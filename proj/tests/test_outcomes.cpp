#include "doctest.h"

#include <cmath>
#include <vector>

#include "dualrisk/errors.hpp"
#include "dualrisk/outcomes.hpp"

using namespace dualrisk;
using out::Atom;
using out::Category;
using out::Outcome;

namespace {

Outcome two_atom() { return Outcome::discrete({{2.0, 0.5}, {-1.0, 0.5}}); }

Outcome example_tail() {
    // P(X = -n) = n^{-2} e^{-3n-3}, head atom at +3 carrying the rest
    return Outcome::exp_tail_with_rest(3.0, 2.0, std::exp(-3.0), 3.0);
}

} // namespace

TEST_CASE("discrete construction sorts, merges duplicates and renormalizes") {
    auto x = Outcome::discrete({{1.0, 0.3}, {1.0, 0.2}, {-1.0, 0.5}});
    REQUIRE(x.kind() == Outcome::Kind::Discrete);
    const auto& a = x.atoms();
    REQUIRE(a.size() == 2);
    CHECK(a[0].value == -1.0);
    CHECK(a[0].prob == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a[1].value == 1.0);
    CHECK(a[1].prob == doctest::Approx(0.5).epsilon(1e-15));

    auto y = Outcome::discrete({{0.0, 0.25}, {1.0, 0.75 + 5e-10}});
    double total = 0.0;
    for (const auto& atom : y.atoms()) total += atom.prob;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("discrete construction rejects malformed input") {
    CHECK_THROWS_AS(Outcome::discrete({}), invalid_distribution);
    CHECK_THROWS_AS(Outcome::discrete({{0.0, 0.5}, {1.0, 0.5 - 1e-7}}), invalid_distribution);
    CHECK_THROWS_AS(Outcome::discrete({{0.0, -0.1}, {1.0, 1.1}}), invalid_distribution);
    CHECK_THROWS_AS(Outcome::discrete({{std::nan(""), 1.0}}), invalid_distribution);
    CHECK_THROWS_AS(
        Outcome::discrete({{std::numeric_limits<double>::infinity(), 1.0}}),
        invalid_distribution);
    // zero-probability atoms are dropped, not errors
    auto x = Outcome::discrete({{1.0, 1.0}, {5.0, 0.0}});
    CHECK(x.atoms().size() == 1);
}

TEST_CASE("loss-side mgf of a two-atom law matches the closed form") {
    auto x = two_atom();
    CHECK(x.mgf_neg(0.0).get() == 1.0);
    // E[e^{-0.2 X}] = 0.5 e^{-0.4} + 0.5 e^{0.2}
    CHECK(x.mgf_neg(0.2).get() ==
          doctest::Approx(0.94586140209790456733).epsilon(1e-15));
    CHECK_THROWS_AS(x.mgf_neg(-0.5), domain_error);
}

TEST_CASE("per-atom exponent guard collapses to +inf instead of overflowing") {
    auto x = Outcome::discrete({{-800.0, 1e-300}, {1.0, 1.0 - 1e-300}});
    auto m1 = x.mgf_neg(1.0); // log term = ln(1e-300) + 800 ~ 109, still finite
    REQUIRE(m1.finite());
    CHECK(m1.get() > 1e40);
    CHECK(x.mgf_neg(2.0).is_inf()); // log term ~ 909 > 700
}

TEST_CASE("discrete moments split positive and negative parts") {
    auto m = two_atom().moments();
    CHECK(m.mean_pos.get() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.mean_neg.get() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.mgf_radius.is_inf());

    auto loss = Outcome::discrete({{-1.0, 1.0}}).moments();
    CHECK(loss.mean_pos.get() == 0.0);
    CHECK(loss.mean_neg.get() == 1.0);
}

TEST_CASE("exponential-power tail law reproduces its series moments") {
    auto x = example_tail();
    REQUIRE(x.kind() == Outcome::Kind::ExpTail);
    auto m = x.moments();
    // head mass 0.99748969293209259466 at +3
    CHECK(m.mean_pos.get() ==
          doctest::Approx(3.0 * 0.99748969293209259466).epsilon(1e-12));
    CHECK(m.mean_neg.get() ==
          doctest::Approx(0.002542584803085098259).epsilon(1e-12));
    CHECK(m.mgf_radius.get() == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("tail law mgf is finite at the radius and infinite beyond it") {
    auto x = example_tail();
    // at alpha = r = 3 the tail series is sum c n^{-2}: finite (p > 1)
    CHECK(x.mgf_neg(3.0).get() ==
          doctest::Approx(0.082019544854384358734).epsilon(1e-10));
    CHECK(x.mgf_neg(3.0 + 1e-7).is_inf());
    CHECK(x.mgf_neg(0.0).get() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tail-law constructor enforces its parameter domain") {
    CHECK_THROWS_AS(Outcome::exp_tail(-0.5, 2.0, 0.1, {{1.0, 0.5}}), invalid_distribution);
    CHECK_THROWS_AS(Outcome::exp_tail(0.0, 1.0, 0.1, {{1.0, 0.5}}), invalid_distribution);
    CHECK_THROWS_AS(Outcome::exp_tail(1.0, 2.0, -0.1, {{1.0, 0.5}}), invalid_distribution);
    // head + tail mass far from 1
    CHECK_THROWS_AS(Outcome::exp_tail(3.0, 2.0, std::exp(-3.0), {{1.0, 0.5}}),
                    invalid_distribution);
}

TEST_CASE("pure power tail has zero exponential-moment radius") {
    // P(X = -n) = c n^{-3}, c = 0.5 / zeta(3); head at +10 with mass 0.5
    auto x = Outcome::exp_tail(0.0, 3.0, 0.41595368629035373434, {{10.0, 0.5}});
    auto m = x.moments();
    CHECK(m.mgf_radius.get() == 0.0);
    CHECK(m.mean_neg.get() == doctest::Approx(0.68421638881010293787).epsilon(1e-12));
    CHECK(m.mean_pos.get() == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(x.classify() == Category::D);
    CHECK(x.mgf_neg(1e-6).is_inf());
}

TEST_CASE("classification covers all four categories") {
    CHECK(two_atom().classify() == Category::A);
    CHECK(Outcome::discrete({{1.0, 0.5}, {2.0, 0.5}}).classify() == Category::B);
    CHECK(Outcome::discrete({{0.0, 1.0}}).classify() == Category::B);
    CHECK(Outcome::discrete({{-1.0, 0.6}, {1.0, 0.4}}).classify() == Category::C);
    // losses exactly balance gains: still C (index +inf)
    CHECK(Outcome::discrete({{-1.0, 0.5}, {1.0, 0.5}}).classify() == Category::C);
    CHECK(example_tail().classify() == Category::A);

    CHECK(std::string(out::category_name(Category::A)) == "A");
    CHECK(std::string(out::category_name(Category::D)) == "D");
}

TEST_CASE("scaling a discrete law scales atoms exactly") {
    auto x = two_atom().scale(2.0);
    const auto& a = x.atoms();
    REQUIRE(a.size() == 2);
    CHECK(a[0].value == -2.0);
    CHECK(a[1].value == 4.0);
    CHECK_THROWS_AS(two_atom().scale(0.0), domain_error);
    CHECK_THROWS_AS(two_atom().scale(-1.0), domain_error);
}

TEST_CASE("shifting a discrete law can change its category") {
    auto x = two_atom().shift(3.0);
    const auto& a = x.atoms();
    CHECK(a[0].value == 2.0);
    CHECK(a[1].value == 5.0);
    CHECK(x.classify() == Category::B);
}

TEST_CASE("tail laws scale and shift without losing series exactness") {
    auto x = example_tail();
    auto sx = x.scale(2.0);
    REQUIRE(sx.kind() == Outcome::Kind::ExpTail);
    // E[e^{-alpha (2X)}] = E[e^{-(2 alpha) X}]
    CHECK(sx.mgf_neg(1.5).get() == doctest::Approx(x.mgf_neg(3.0).get()).epsilon(1e-12));
    CHECK(sx.moments().mgf_radius.get() == doctest::Approx(1.5).epsilon(1e-14));

    auto tx = x.shift(-1.0);
    REQUIRE(tx.kind() == Outcome::Kind::ExpTail);
    auto m = tx.moments();
    // E[(X-1)^-] = E[X^-] + tail mass + head contribution (head moves to +2)
    const double tail_mass = 0.0025103070679074053413;
    CHECK(m.mean_neg.get() ==
          doctest::Approx(0.002542584803085098259 + tail_mass).epsilon(1e-12));
    CHECK(m.mgf_radius.get() == doctest::Approx(3.0).epsilon(1e-14));
    // shift by +2: tail atoms at -n+2 put n=1 at +1, n=2 at 0 (both nonnegative)
    auto ux = x.shift(2.0);
    auto mu = ux.moments();
    CHECK(mu.mean_neg.get() <
          doctest::Approx(0.002542584803085098259).epsilon(1e-12));
    CHECK(mu.mean_neg.get() > 0.0);
}

TEST_CASE("truncation clamps discrete laws and merges clamped atoms") {
    auto x = Outcome::discrete({{-5.0, 0.2}, {-2.0, 0.3}, {1.0, 0.3}, {4.0, 0.2}});
    auto t = x.truncate(2.0);
    const auto& a = t.atoms();
    REQUIRE(a.size() == 3);
    CHECK(a[0].value == -2.0);
    CHECK(a[0].prob == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a[2].value == 2.0);
    CHECK(a[2].prob == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(x.truncate(0.0), domain_error);
}

TEST_CASE("truncating a tail law materializes atoms with folded tail mass") {
    auto x = example_tail();
    auto t = x.truncate(5.0);
    REQUIRE(t.kind() == Outcome::Kind::Discrete);
    const auto& a = t.atoms();
    REQUIRE(a.size() == 6); // -5..-1 and +3
    double total = 0.0;
    for (const auto& atom : a) total += atom.prob;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.front().value == -5.0);
    CHECK(a.back().value == 3.0);
    // P(X = -1) = e^{-6}
    CHECK(a[4].value == -1.0);
    CHECK(a[4].prob == doctest::Approx(std::exp(-6.0)).epsilon(1e-13));
    // clamped mass folds downward-tail probability onto -5
    CHECK(a.front().prob > std::exp(-3.0) * std::exp(-15.0) / 25.0);

    // X_n >= X pointwise, so E[e^{-3 X_n}] <= E[e^{-3 X}]; and the truncated
    // law is bounded, so its mgf is finite everywhere
    CHECK(t.mgf_neg(3.0).get() <= x.mgf_neg(3.0).get() + 1e-15);
    CHECK(t.mgf_neg(4.0).finite());
    CHECK(x.mgf_neg(4.0).is_inf());
}

TEST_CASE("independent sums convolve finite discrete laws") {
    auto x = Outcome::discrete({{1.0, 0.5}, {-1.0, 0.5}});
    auto s = Outcome::independent_sum(x, x);
    const auto& a = s.atoms();
    REQUIRE(a.size() == 3);
    CHECK(a[0].value == -2.0);
    CHECK(a[0].prob == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(a[1].value == 0.0);
    CHECK(a[1].prob == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a[2].value == 2.0);
    CHECK_THROWS_AS(Outcome::independent_sum(x, example_tail()), domain_error);
}

TEST_CASE("mean-preserving spread splits an atom symmetrically") {
    auto x = two_atom(); // sorted: -1 first
    auto s = x.mean_preserving_spread(0, 0.5);
    const auto& a = s.atoms();
    REQUIRE(a.size() == 3);
    CHECK(a[0].value == -1.5);
    CHECK(a[0].prob == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(a[1].value == -0.5);
    CHECK(a[2].value == 2.0);
    double mean_before = 0.0, mean_after = 0.0;
    for (const auto& atom : x.atoms()) mean_before += atom.value * atom.prob;
    for (const auto& atom : a) mean_after += atom.value * atom.prob;
    CHECK(mean_after == doctest::Approx(mean_before).epsilon(1e-15));
    CHECK_THROWS_AS(x.mean_preserving_spread(5, 0.1), domain_error);
}

TEST_CASE("normal-map laws expose quadrature moments and declared radius") {
    // X = 0.5 + Z: E[e^{-alpha X}] = e^{-alpha/2 + alpha^2/2}, unity at alpha = 1
    auto x = Outcome::normal_map([](double z) { return 0.5 + z; });
    REQUIRE(x.kind() == Outcome::Kind::NormalMap);
    CHECK(x.map_at(0.25) == 0.75);
    auto m = x.moments();
    CHECK(m.mgf_radius.is_inf());
    CHECK(m.mean_pos.get() > m.mean_neg.get());
    CHECK(x.mgf_neg(0.6).get() == doctest::Approx(std::exp(-0.3 + 0.18)).epsilon(1e-10));
    CHECK(x.mgf_neg(1.0).get() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(x.classify() == Category::A);

    // E[Z^+] = E[Z^-] = 1/sqrt(2 pi)
    auto z = Outcome::normal_map([](double t) { return t; });
    auto mz = z.moments();
    CHECK(mz.mean_pos.get() == doctest::Approx(0.39894228040143267794).epsilon(1e-10));
    CHECK(mz.mean_neg.get() == doctest::Approx(0.39894228040143267794).epsilon(1e-10));

    // loss-heavy map: mean negative, category C
    auto c = Outcome::normal_map([](double t) { return t - 0.1; });
    CHECK(c.classify() == Category::C);
}

TEST_CASE("normal maps with declared zero radius classify as heavy-tailed") {
    // X = 1 - 0.5 e^{0.5 Z}: loss side grows like e^{0.5 z}, no exponential moment
    out::NormalMapInfo info;
    info.mgf_radius = num::ExtReal::of(0.0);
    auto x = Outcome::normal_map([](double z) { return 1.0 - 0.5 * std::exp(0.5 * z); }, info);
    auto m = x.moments();
    CHECK(m.mean_pos.get() > m.mean_neg.get());
    CHECK(m.mean_neg.get() > 0.0);
    CHECK(x.classify() == Category::D);
    CHECK(x.mgf_neg(0.5).is_inf());

    // truncation bounds the law, making every exponential moment finite
    auto t = x.truncate(3.0);
    CHECK(t.moments().mgf_radius.is_inf());
    CHECK(t.classify() == Category::A);
    CHECK(t.mgf_neg(2.0).finite());
}

TEST_CASE("normal-map metadata is validated") {
    out::NormalMapInfo bad_nodes;
    bad_nodes.quad_nodes = 7;
    CHECK_THROWS_AS(Outcome::normal_map([](double z) { return z; }, bad_nodes),
                    invalid_distribution);
    CHECK_THROWS_AS(Outcome::normal_map(nullptr), invalid_distribution);
}

TEST_CASE("scaling and shifting normal maps compose with the underlying map") {
    auto x = Outcome::normal_map([](double z) { return 0.5 + z; });
    auto y = x.scale(2.0).shift(-1.0); // 2(0.5 + Z) - 1 = 2Z
    CHECK(y.map_at(1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(y.map_at(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(y.mgf_neg(0.5).get() == doctest::Approx(std::exp(0.5)).epsilon(1e-10));
}
