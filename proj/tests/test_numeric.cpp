#include <doctest.h>

#include "ivmnar/errors.hpp"
#include "ivmnar/numeric.hpp"

#include <limits>

using namespace ivmnar;

TEST_CASE("parse_rational: fractions, decimals, exponents") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational(" -6/8 ") == Rational(-3, 4));
    CHECK(parse_rational("0.125") == Rational(1, 8));
    CHECK(parse_rational("1e-3") == Rational(1, 1000));
    CHECK(parse_rational("2.5E+1") == Rational(25));
    CHECK(parse_rational("007/010") == Rational(7, 10));
    CHECK(parse_rational("0.0625") == Rational(1, 16));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational(""), Error);
}

TEST_CASE("parse_double accepts p/q") {
    CHECK(parse_double("1/4") == 0.25);
    CHECK(parse_double("0.1") == 0.1);
    CHECK_THROWS_AS(parse_double("0.1x"), Error);
}

TEST_CASE("format round-trips") {
    CHECK(format(Rational(1, 3)) == "1/3");
    CHECK(format(Rational(2)) == "2");
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.125, std::numeric_limits<double>::denorm_min()})
        CHECK(parse_double(format(x)) == x);
    // the decimal text of a double converts to the same double exactly
    CHECK(from_double<Rational>(0.1).convert_to<double>() == 0.1);
}

TEST_CASE("tolerance helpers") {
    CHECK(is_zero(1e-13, 1e-12));
    CHECK_FALSE(is_zero(1e-11, 1e-12));
    CHECK(is_zero(Rational(0), 1.0));
    CHECK_FALSE(is_zero(Rational(1, 1000000000), 1.0));  // exact mode ignores the band
    CHECK(clamp_nonneg(-1e-15) == 0.0);
}
