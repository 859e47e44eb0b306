#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace ivmnar {

using Rational = boost::multiprecision::cpp_rational;

struct Tolerances {
    double det = 1e-10;   // normalized-determinant floor for dependence checks
    double prob = 1e-12;  // round-off band for probabilities / sums
};

// Exact vs binary64 behaviour lives here so the algorithms are written once.
template <class T> struct Num;

template <> struct Num<double> {
    static constexpr bool exact = false;
    static double to_double(double x) { return x; }
    static double abs(double x) { return std::fabs(x); }
    static bool zero(double x, double tol) { return std::fabs(x) < tol; }
    static bool equal(double a, double b, double tol) { return std::fabs(a - b) < tol; }
    static double sqrt_or_self(double x) { return std::sqrt(x); }
};

template <> struct Num<Rational> {
    static constexpr bool exact = true;
    static double to_double(const Rational& x) { return x.convert_to<double>(); }
    static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
    static bool zero(const Rational& x, double) { return x == 0; }
    static bool equal(const Rational& a, const Rational& b, double) { return a == b; }
};

template <class T> inline double to_double(const T& x) { return Num<T>::to_double(x); }
template <class T> inline bool is_zero(const T& x, double tol) { return Num<T>::zero(x, tol); }
template <class T> inline bool nearly_equal(const T& a, const T& b, double tol) {
    return Num<T>::equal(a, b, tol);
}
// strictly positive beyond round-off
template <class T> inline bool is_positive(const T& x, double tol) {
    if constexpr (Num<T>::exact) return x > 0;
    else return x >= tol;
}
// negative beyond round-off
template <class T> inline bool is_negative(const T& x, double tol) {
    if constexpr (Num<T>::exact) return x < 0;
    else return x < -tol;
}
template <class T> inline T clamp_nonneg(const T& x) { return x < 0 ? T(0) : x; }

// "0.25", "1/4", "-3/8", "1e-3"
Rational parse_rational(std::string_view s);
double parse_double(std::string_view s);

template <class T> T parse_prob(std::string_view s);
template <> inline Rational parse_prob<Rational>(std::string_view s) { return parse_rational(s); }
template <> inline double parse_prob<double>(std::string_view s) { return parse_double(s); }

std::string format(const Rational& x);
std::string format(double x);

template <class T> T from_double(double x);
template <> inline double from_double<double>(double x) { return x; }
template <> inline Rational from_double<Rational>(double x) { return parse_rational(format(x)); }

template <class T> std::vector<double> to_doubles(const std::vector<T>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(to_double(x));
    return out;
}

}  // namespace ivmnar
