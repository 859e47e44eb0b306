#include <doctest.h>

#include "support.hpp"

#include "ivmnar/dataset.hpp"
#include "ivmnar/errors.hpp"

using namespace ivmnar;
using namespace ivmnar::testing;

namespace {

ErrorKind kind_of(std::string_view text) {
    try {
        parse_dataset_text(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error");
    return ErrorKind::ParseError;
}

}  // namespace

TEST_CASE("parse: regimes are inferred") {
    CHECK(parse_dataset_text("z,d,y\n0,0,1\n1,1,0\n").regime == Regime::Complete);
    CHECK(parse_dataset_text("z,d,y\n0,0,\n1,1,0\n").regime == Regime::OutcomeOnly);
    CHECK(parse_dataset_text("z,d,y\n0,,1\n1,1,0\n").regime == Regime::TreatmentOnly);
    CHECK(parse_dataset_text("z,d,y\n0,,\n1,1,0\n").regime == Regime::Both);
}

TEST_CASE("parse: BOM, CRLF and blank lines") {
    auto ds = parse_dataset_text("\xEF\xBB\xBFz,d,y\r\n0,1,2.5\r\n\r\n1,0,\r\n");
    REQUIRE(ds.records.size() == 2);
    CHECK(*ds.records[0].y == 2.5);
    CHECK_FALSE(ds.records[1].y);
}

TEST_CASE("parse: errors") {
    CHECK(kind_of("z,y,d\n0,0,0\n") == ErrorKind::MalformedRow);
    CHECK(kind_of("z,d,y\n0,0\n") == ErrorKind::MalformedRow);
    CHECK(kind_of("z,d,y\n2,0,0\n") == ErrorKind::MalformedRow);
    CHECK(kind_of("z,d,y\n0,x,0\n") == ErrorKind::MalformedRow);
    CHECK(kind_of("z,d,y\n,0,0\n") == ErrorKind::MissingInstrument);
    CHECK(kind_of("z,d,y\n0,0,abc\n") == ErrorKind::UnknownOutcomeValue);
    try {
        parse_dataset_text("z,d,y\n0,0,0\n1,1\n");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("csv round trip") {
    Rng g(1);
    auto m = lookup("1ZD(+)2UD").spec;
    auto p = to_float(random_params(m, g, {}));
    auto ds = sample_dataset(p, m, 2000, 9);
    auto back = parse_dataset_text(to_csv(ds));
    REQUIRE(back.records.size() == ds.records.size());
    CHECK(back.regime == ds.regime);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        CHECK(back.records[i].z == ds.records[i].z);
        CHECK(back.records[i].d == ds.records[i].d);
        CHECK(back.records[i].y == ds.records[i].y);
    }
}

TEST_CASE("empirical observable") {
    auto ds = parse_dataset_text("z,d,y\n0,0,0\n0,0,1\n0,0,\n0,0,1\n1,1,1\n1,0,0\n1,1,\n1,1,1\n");
    auto o = empirical_observable(ds, {true});
    CHECK(o.regime == Regime::OutcomeOnly);
    CHECK(o.pZ == 0.5);
    // names are d, y, r^Y | z
    CHECK(o.cell("001|0") == 0.25);
    CHECK(o.cell("011|0") == 0.5);
    CHECK(o.cell("0+0|0") == 0.25);
    CHECK(o.cell("111|1") == 0.5);
    CHECK(o.cell("001|1") == 0.25);
    CHECK(o.cell("1+0|1") == 0.25);
    CHECK(arm_total(o, 0) == doctest::Approx(1));

    SUBCASE("declared one-sided but z=0 has takers") {
        auto two = parse_dataset_text("z,d,y\n0,1,0\n0,0,1\n1,1,1\n1,0,0\n");
        CHECK_THROWS_WITH_AS(empirical_observable(two, {true}), doctest::Contains("SidednessMismatch"), Error);
        CHECK_NOTHROW(empirical_observable(two, {false}));
    }
    SUBCASE("empty arm") {
        CHECK_THROWS_WITH_AS(empirical_observable(parse_dataset_text("z,d,y\n0,0,1\n0,1,0\n")), doctest::Contains("EmptyArm"), Error);
    }
    SUBCASE("smoothing keeps structural zeros") {
        auto s = empirical_observable(ds, {true, true});
        CHECK(s.cell("101|0") == 0.0);
        CHECK(s.cell("011|1") > 0.0);
        CHECK(arm_total(s, 1) == doctest::Approx(1));
    }
}

TEST_CASE("sensitivity captures errors per entry") {
    Rng g(2);
    auto m = lookup("1UD").spec;
    DrawOptions d;
    d.oneSided = true;
    auto obs = to_float(forward_observable(random_params(m, g, d), m));
    auto rep = run_sensitivity(obs, {"MCAR-Y", "1UD", "1ZDY", "2ZD", "nonsense"});
    REQUIRE(rep.entries.size() == 5);
    CHECK(rep.entries[0].applicable);
    CHECK(rep.entries[1].applicable);
    CHECK_FALSE(rep.entries[2].applicable);
    CHECK(rep.entries[2].reason.find("not identifiable") != std::string::npos);
    CHECK(rep.entries[3].errorKind == "RegimeMismatch");
    CHECK(rep.entries[4].errorKind == "UnknownMechanism");
    auto j = sensitivity_to_json(rep);
    CHECK(j["entries"].size() == 5);
    CHECK(sensitivity_table(rep).find("1UD") != std::string::npos);
}
