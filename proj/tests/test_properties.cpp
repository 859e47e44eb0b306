#include <doctest.h>

#include "support.hpp"

#include "ivmnar/errors.hpp"

using namespace ivmnar;
using namespace ivmnar::testing;

// identify(forward(P)) == true_cace(P), exact, for every identifiable mechanism
TEST_CASE("property: exact round trip") {
    Rng g(1001);
    for (const auto* e : identifiable_entries(true)) {
        int got = 0;
        for (int tries = 0; got < 20 && tries < 400; ++tries) {
            DrawOptions d;
            d.oneSided = pick_one_sided(e->spec, g);
            d.ny = pick_ny(*e, d.oneSided, g);
            auto p = random_params(e->spec, g, d);
            auto obs = forward_observable(p, e->spec);
            if (!usable(p, e->spec, to_float(obs), 0.0)) continue;
            ++got;
            CHECK_MESSAGE(identify(e->spec.id, obs).cace == true_cace(p), e->spec.id);
        }
        CHECK_MESSAGE(got == 20, e->spec.id);
    }
}

// the estimate does not depend on the response probabilities
TEST_CASE("property: invariance to the missingness law") {
    Rng g(1002);
    for (const char* id : {"1ZD", "1UD", "2ZY", "2DY", "1UD(+)2UD", "1ZY+2ZD"}) {
        const auto& e = lookup(id);
        DrawOptions d;
        d.oneSided = pick_one_sided(e.spec, g);
        auto p = random_params(e.spec, g, d);
        auto q = p;
        Rng h(7);
        for (auto& [k, v] : q.responseY.prob) v = frac(h, 5, 19, 20);
        for (auto& [k, v] : q.responseD.prob) v = frac(h, 5, 19, 20);
        auto op = forward_observable(p, e.spec), oq = forward_observable(q, e.spec);
        if (!check_conditions(id, op).all_pass() || !check_conditions(id, oq).all_pass()) continue;
        CHECK_MESSAGE(identify(id, op).cace == identify(id, oq).cace, id);
    }
}

// MCAR response: every mechanism whose regime matches gives the Wald estimate
TEST_CASE("property: constant response reduces to Wald") {
    Rng g(1003);
    for (const auto* e : identifiable_entries(true)) {
        DrawOptions d;
        d.oneSided = pick_one_sided(e->spec, g);
        auto p = random_params(e->spec, g, d);
        for (auto& [k, v] : p.responseY.prob) v = Rational(3, 5);
        for (auto& [k, v] : p.responseD.prob) v = Rational(4, 5);
        auto obs = forward_observable(p, e->spec);
        if (!check_conditions(e->spec.id, obs).all_pass()) continue;
        CHECK_MESSAGE(identify(e->spec.id, obs).cace == wald_cace(complete_observable(p)), e->spec.id);
    }
}

// relabeling Y -> a + b*Y scales the CACE by b
TEST_CASE("property: affine outcome relabeling") {
    Rng g(1004);
    for (const char* id : {"1ZD", "1DY", "2ZD", "2UD"}) {
        const auto& e = lookup(id);
        DrawOptions d;
        d.oneSided = pick_one_sided(e.spec, g);
        auto p = random_params(e.spec, g, d);
        auto obs = forward_observable(p, e.spec);
        if (!check_conditions(id, obs).all_pass()) continue;
        auto shifted = obs;
        for (auto& y : shifted.ySupport) y = Rational(3) + Rational(2) * y;
        CHECK_MESSAGE(identify(id, shifted).cace == Rational(2) * identify(id, obs).cace, id);
    }
}

// the observable is a probability table
TEST_CASE("property: forward output is a valid table") {
    Rng g(1005);
    for (const auto& e : catalog()) {
        DrawOptions d;
        d.oneSided = pick_one_sided(e.spec, g);
        auto obs = forward_observable(random_params(e.spec, g, d), e.spec);
        CHECK_MESSAGE(check_observable(obs).empty(), e.spec.id);
        CHECK(arm_total(obs, 0) == 1);
        CHECK(arm_total(obs, 1) == 1);
    }
}
