#include <doctest.h>

#include "support.hpp"

#include "ivmnar/errors.hpp"

using namespace ivmnar;
using namespace ivmnar::testing;

namespace {

ObservableDistribution<Rational> complete_table(const std::array<std::array<Rational, 4>, 2>& cells) {
    auto o = ObservableDistribution<Rational>::zeros(Regime::Complete, Rational(1, 2), {Rational(0), Rational(1)}, false);
    for (int z = 0; z < 2; ++z)
        for (int d = 0; d < 2; ++d)
            for (int y = 0; y < 2; ++y) o.arm[z].full[d][y] = cells[z][2 * d + y];
    return o;
}

}  // namespace

TEST_CASE("wald: textbook table") {
    // z=0: P(d=0,y=0)=.4 P(0,1)=.3 P(1,0)=.1 P(1,1)=.2 ; z=1: .1 .1 .3 .5
    auto o = complete_table({{{Rational(4, 10), Rational(3, 10), Rational(1, 10), Rational(2, 10)},
                              {Rational(1, 10), Rational(1, 10), Rational(3, 10), Rational(5, 10)}}});
    // EY: .5 vs .6 ; ED: .3 vs .8
    CHECK(wald_cace(o) == Rational(1, 5));
    CHECK(identify("MCAR-Y", embed(o, Regime::OutcomeOnly)).cace == Rational(1, 5));
}

TEST_CASE("wald: zero first stage") {
    auto o = complete_table({{{Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)},
                              {Rational(1, 8), Rational(3, 8), Rational(1, 4), Rational(1, 4)}}});
    CHECK_THROWS_WITH_AS(wald_cace(o), doctest::Contains("ZeroFirstStage"), Error);
}

TEST_CASE("solve_binary_ratio") {
    // p1 = 2/3, p0 = 1/3: r1 = p0/p1, r0 = (1-p0)/(1-p1)
    auto s = solve_binary_ratio(Rational(1, 2), Rational(2));
    REQUIRE(s.meansIdentified);
    CHECK(s.p1 == Rational(2, 3));
    CHECK(s.p0 == Rational(1, 3));
    // equal ratios of one: means not separately identified
    CHECK_FALSE(solve_binary_ratio(Rational(1), Rational(1)).meansIdentified);
    CHECK_THROWS_AS(solve_binary_ratio(Rational(2), Rational(2)), Error);
    CHECK_THROWS_AS(solve_binary_ratio(Rational(-1), Rational(2)), Error);
    auto f = solve_binary_ratio(0.5, 2.0);
    CHECK(f.p1 == doctest::Approx(2.0 / 3));
}

TEST_CASE("strip_stratum") {
    std::vector<Rational> arm{Rational(1, 2), Rational(1, 4)}, cp{Rational(1, 4), Rational(1, 8)};
    auto out = strip_stratum(arm, cp, Rational(1));
    CHECK(out == std::vector<Rational>{Rational(1, 4), Rational(1, 8)});
    auto per = strip_stratum(arm, cp, std::vector<Rational>{Rational(2), Rational(1)});
    CHECK(per == std::vector<Rational>{Rational(0), Rational(1, 8)});
    try {
        strip_stratum(arm, cp, Rational(3));
        FAIL("expected NegativeStratumMass");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NegativeStratumMass);
    }
    // float round-off below tolProb is clamped
    auto f = strip_stratum(std::vector<double>{0.3}, std::vector<double>{0.1}, 3.0);
    CHECK(f[0] == 0.0);
}

TEST_CASE("identify: unknown and unidentifiable mechanisms") {
    Rng g(5);
    auto m = lookup("1ZD").spec;
    auto obs = forward_observable(random_params(m, g, {}), m);
    CHECK_THROWS_WITH_AS(identify("1QQ", obs), doctest::Contains("UnknownMechanism"), Error);
    try {
        identify("1ZDY", obs);
        FAIL("expected refusal");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MechanismNotIdentifiable);
    }
}

TEST_CASE("identify: regime mismatch") {
    Rng g(6);
    auto m = lookup("2ZD").spec;
    auto obs = forward_observable(random_params(m, g, {}), m);
    try {
        identify("1ZD", obs);
        FAIL("expected RegimeMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RegimeMismatch);
    }
}

TEST_CASE("identify: positivity") {
    Rng g(7);
    auto m = lookup("1ZD").spec;
    auto p = random_params(m, g, {});
    for (auto& [k, v] : p.responseY.prob)
        if (k[0] == 1 && k[2] == 1) v = 0;  // nobody with z=1, d=1 responds
    auto obs = forward_observable(p, m);
    try {
        identify("1ZD", obs);
        FAIL("expected PositivityViolated");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PositivityViolated);
    }
    auto rep = check_conditions("1ZD", obs);
    CHECK_FALSE(rep.all_pass());
}

TEST_CASE("identify: complier means and nuisance are reported") {
    Rng g(8);
    auto m = lookup("1ZD").spec;
    auto p = random_params(m, g, {});
    auto r = identify("1ZD", forward_observable(p, m));
    REQUIRE(r.complierMeans);
    CHECK((*r.complierMeans)[1] - (*r.complierMeans)[0] == r.cace);
    CHECK(r.cace == true_cace(p));
    CHECK_FALSE(r.nuisance.empty());
    CHECK(r.joint);
}

TEST_CASE("identify: exact and float agree on a saturated mechanism") {
    Rng g(9);
    for (const char* id : {"1UD", "2UY", "1UD(+)2UD", "1ZY+2ZD"}) {
        const auto& e = lookup(id);
        for (int i = 0; i < 10; ++i) {
            DrawOptions d;
            d.oneSided = pick_one_sided(e.spec, g);
            auto p = random_params(e.spec, g, d);
            auto obs = forward_observable(p, e.spec);
            if (!check_conditions(id, obs).all_pass()) continue;
            auto x = identify(id, obs).cace;
            CHECK_MESSAGE(x == true_cace(p), id);
            CHECK_MESSAGE(identify(id, to_float(obs)).cace == doctest::Approx(x.convert_to<double>()).epsilon(1e-9), id);
        }
    }
}

TEST_CASE("identify: one-sided mechanism rejects two-sided data") {
    Rng g(10);
    auto m = lookup("2ZU").spec;
    DrawOptions d;
    auto obs = forward_observable(random_params(m, g, d), m);
    try {
        identify("2ZU", obs);
        FAIL("expected refusal");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SidednessMismatch);
    }
}

TEST_CASE("identify: D never missing skips the R^D=0 system") {
    Rng g(11);
    const auto& m = lookup("1Y(+)2ZU").spec;
    DrawOptions d;
    d.oneSided = true;
    d.responsesOne = true;
    auto p = random_params(m, g, d);
    for (auto& [k, v] : p.responseY.prob) v = Rational(1, 2);
    auto obs = forward_observable(p, m);
    CHECK(identify("1Y(+)2ZU", obs).cace == true_cace(p));
}
