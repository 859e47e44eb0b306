#include <doctest.h>

#include "ivmnar/errors.hpp"
#include "ivmnar/fixtures.hpp"

using namespace ivmnar;

TEST_CASE("fourteen fixtures, all verified") {
    const auto& fx = builtin_fixtures();
    REQUIRE(fx.size() == 14);
    for (const auto& f : fx) {
        auto r = verify_fixture(f);
        CHECK_MESSAGE(r.all_pass(), f.id);
        CHECK(f.caceA != f.caceB);
    }
    CHECK(builtin_fixture("S3.1.1").mechanism == "1DY");
    CHECK_THROWS_AS(builtin_fixture("S9.9.9"), Error);
}

TEST_CASE("a perturbed fixture no longer verifies") {
    auto f = builtin_fixture("S3.2.1");
    f.caceA += Rational(1, 1000);
    CHECK_FALSE(verify_fixture(f).caceMatch);

    auto g = builtin_fixture("S3.1.2");
    auto cells = g.observables.named_cells();
    auto& c = g.observables.cell(cells.front().first);
    c += Rational(1, 100);
    auto r = verify_fixture(g);
    CHECK_FALSE(r.forwardA);
    CHECK_FALSE(r.all_pass());
}

TEST_CASE("fixture json round trip") {
    for (const auto& f : builtin_fixtures()) {
        auto back = fixture_from_json(fixture_to_json(f));
        CHECK(back.id == f.id);
        CHECK(back.caceA == f.caceA);
        CHECK(back.caceB == f.caceB);
        CHECK(verify_fixture(back).all_pass());
    }
}

TEST_CASE("search_alternative") {
    const auto& f = builtin_fixture("S3.1.1");
    auto obs = to_float(f.observables);
    CHECK_FALSE(search_alternative(obs, f.mechanism, 1, 0));
    // from the observables alone, find a second law with a CACE away from 1/2
    auto alt = search_alternative(obs, f.mechanism, 1, 200000, 0.5);
    REQUIRE(alt);
    CHECK(alt->residual < 1e-10);
    CHECK(std::fabs(alt->cace - 0.5) > 1e-3);
}
