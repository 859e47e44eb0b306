#include <doctest.h>

#include "support.hpp"

#include "ivmnar/errors.hpp"
#include "ivmnar/io.hpp"

using namespace ivmnar;
using namespace ivmnar::testing;

TEST_CASE("numbers") {
    CHECK(number_to_json(Rational(2, 6)) == "1/3");
    CHECK(number_to_json(0.25) == 0.25);
    CHECK(number_from_json<Rational>(json("3/9")) == Rational(1, 3));
    CHECK(number_from_json<Rational>(json(2)) == Rational(2));
    CHECK(number_from_json<Rational>(json(0.5)) == Rational(1, 2));
    CHECK(number_from_json<double>(json("1/4")) == 0.25);
}

TEST_CASE("params round trip for every mechanism") {
    Rng g(21);
    for (const auto& e : catalog()) {
        DrawOptions d;
        d.oneSided = pick_one_sided(e.spec, g);
        auto p = random_params(e.spec, g, d);
        auto j = params_to_json(p, e.spec.id);
        auto cfg = params_config_from_json<Rational>(j);
        CHECK(cfg.mechanism == e.spec.id);
        CHECK_MESSAGE(same_cells(forward_observable(cfg.params, e.spec), forward_observable(p, e.spec)), e.spec.id);
        CHECK(true_cace(cfg.params) == true_cace(p));
    }
}

TEST_CASE("params: keys must match the parents") {
    json j = {{"mechanism", "1ZD"},
              {"pZ", "1/2"},
              {"piU", {{"a", "1/4"}, {"c", "1/2"}, {"n", "1/4"}}},
              {"outcomeLaw", {{"a1", "1/2"}, {"n0", "1/2"}, {"c0", "1/3"}, {"c1", "2/3"}}},
              {"responseY", "1/2"}};
    CHECK_NOTHROW(params_config_from_json<Rational>(j));
    j["responseY"] = {{"u=c,d=0", "1/2"}};
    CHECK_THROWS_WITH_AS(params_config_from_json<Rational>(j), doctest::Contains("ParseError"), Error);
    j["responseY"] = "1/2";
    j["responseD"] = "1/2";  // no R^D in this regime
    CHECK_THROWS_AS(params_config_from_json<Rational>(j), Error);
}

TEST_CASE("observable round trip") {
    Rng g(22);
    auto m = lookup("1UY(+)2UD").spec;
    auto obs = forward_observable(random_params(m, g, {}), m);
    auto back = observable_from_json<Rational>(observable_to_json(obs));
    CHECK(same_cells(back, obs));
    CHECK(back.regime == obs.regime);
    auto f = observable_from_json<double>(observable_to_json(to_float(obs)));
    CHECK(same_cells(f, to_float(obs)));
}

TEST_CASE("result json") {
    Rng g(23);
    auto m = lookup("1ZD").spec;
    auto r = identify("1ZD", forward_observable(random_params(m, g, {}), m));
    auto j = result_to_json(r);
    CHECK(j["mechanism"] == "1ZD");
    CHECK(j["cace"].is_string());
    CHECK(j["complierMeans"].contains("d1"));
}

TEST_CASE("shipped config parses") {
    auto cfg = params_config_from_json<Rational>(load_json(std::string(IVMNAR_DATA_DIR) + "/configs/1ud-one-sided.json"));
    CHECK(cfg.mechanism == "1UD");
    CHECK(true_cace(cfg.params) == Rational(1, 3));
}
