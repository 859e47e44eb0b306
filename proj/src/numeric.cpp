#include "ivmnar/numeric.hpp"

#include "ivmnar/errors.hpp"

#include <charconv>
#include <cstdio>

namespace ivmnar {

namespace {

using boost::multiprecision::cpp_int;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

cpp_int parse_int(std::string_view s) {
    if (s.empty()) throw Error(ErrorKind::ParseError, "empty integer");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw Error(ErrorKind::ParseError, "bad integer '" + std::string(s) + "'");
    for (std::size_t j = i; j < s.size(); ++j)
        if (s[j] < '0' || s[j] > '9') throw Error(ErrorKind::ParseError, "bad integer '" + std::string(s) + "'");
    auto digits = s.substr(i);
    // cpp_int reads a leading 0 as octal
    while (digits.size() > 1 && digits[0] == '0') digits.remove_prefix(1);
    cpp_int v{std::string(digits)};
    return s[0] == '-' ? cpp_int(-v) : v;
}

// decimal with optional exponent, converted exactly
Rational parse_decimal(std::string_view s) {
    long exp10 = 0;
    auto e = s.find_first_of("eE");
    if (e != std::string_view::npos) {
        auto es = s.substr(e + 1);
        if (!es.empty() && es[0] == '+') es.remove_prefix(1);
        auto [p, ec] = std::from_chars(es.data(), es.data() + es.size(), exp10);
        if (ec != std::errc() || p != es.data() + es.size())
            throw Error(ErrorKind::ParseError, "bad exponent in '" + std::string(s) + "'");
        s = s.substr(0, e);
    }
    std::string digits;
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) { neg = s[0] == '-'; s.remove_prefix(1); }
    auto dot = s.find('.');
    if (dot != std::string_view::npos) {
        digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
        exp10 -= static_cast<long>(s.size() - dot - 1);
    } else {
        digits = std::string(s);
    }
    if (digits.empty()) throw Error(ErrorKind::ParseError, "bad number");
    Rational v(parse_int(digits));
    cpp_int ten = 1;
    for (long k = 0; k < (exp10 < 0 ? -exp10 : exp10); ++k) ten *= 10;
    v = exp10 < 0 ? Rational(v / Rational(ten)) : Rational(v * Rational(ten));
    return neg ? Rational(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view s) {
    s = trim(s);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_decimal(s);
    cpp_int num = parse_int(trim(s.substr(0, slash)));
    cpp_int den = parse_int(trim(s.substr(slash + 1)));
    if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
}

double parse_double(std::string_view s) {
    s = trim(s);
    if (s.find('/') != std::string_view::npos) return parse_rational(s).convert_to<double>();
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw Error(ErrorKind::ParseError, "bad number '" + std::string(s) + "'");
    return v;
}

std::string format(const Rational& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

// shortest text that reads back to the same double
std::string format(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

}  // namespace ivmnar
