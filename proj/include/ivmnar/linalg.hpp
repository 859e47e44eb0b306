#pragma once

#include "ivmnar/errors.hpp"
#include "ivmnar/numeric.hpp"

#include <cmath>
#include <vector>

namespace ivmnar {

template <class T> using Rows = std::vector<std::vector<T>>;

// Gaussian elimination; partial pivoting in float mode, first nonzero pivot in exact mode.
template <class T> T determinant(Rows<T> a) {
    const std::size_t n = a.size();
    T det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        if constexpr (Num<T>::exact) {
            while (piv < n && a[piv][c] == 0) ++piv;
            if (piv == n) return T(0);
        } else {
            for (std::size_t r = c + 1; r < n; ++r)
                if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
            if (a[piv][c] == 0) return T(0);
        }
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            T f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

// |det| / prod(row norms), maximized over all square row subsets. 0 means the
// columns are linearly dependent; 1 means orthogonal rows.
struct RankProbe {
    double magnitude = 0;
    bool fullRank = false;            // exact: some subset has det != 0; float: magnitude >= tolDet
    std::vector<std::size_t> best;    // rows of the best-conditioned subset
};

template <class T> RankProbe probe_rank(const Rows<T>& rows, std::size_t cols, double tolDet) {
    RankProbe out;
    const std::size_t m = rows.size();
    if (cols == 0 || m < cols) return out;
    std::vector<std::size_t> idx(cols);
    for (std::size_t i = 0; i < cols; ++i) idx[i] = i;
    bool exactNonzero = false;
    while (true) {
        Rows<T> sub;
        double norms = 1;
        for (auto r : idx) {
            sub.push_back(rows[r]);
            double s = 0;
            for (const auto& x : rows[r]) s += to_double(x) * to_double(x);
            norms *= std::sqrt(s);
        }
        T det = determinant(sub);
        double mag = norms > 0 ? std::fabs(to_double(det)) / norms : 0.0;
        if (det != 0 && (!exactNonzero || mag > out.magnitude)) {
            out.magnitude = mag;
            out.best = idx;
            exactNonzero = true;
        }
        // next combination
        std::size_t i = cols;
        while (i > 0 && idx[i - 1] == m - cols + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < cols; ++j) idx[j] = idx[j - 1] + 1;
    }
    if constexpr (Num<T>::exact) out.fullRank = exactNonzero;
    else out.fullRank = exactNonzero && out.magnitude >= tolDet;
    return out;
}

template <class T> std::vector<T> solve_square(Rows<T> a, std::vector<T> b) {
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        if constexpr (Num<T>::exact) {
            while (piv < n && a[piv][c] == 0) ++piv;
        } else {
            for (std::size_t r = c + 1; r < n; ++r)
                if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        }
        if (piv == n || a[piv][c] == 0) throw Error(ErrorKind::SingularSystem, "singular system");
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            T f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// Least squares through Householder QR (float mode only).
std::vector<double> least_squares(const Rows<double>& a, const std::vector<double>& b);

// Solve coefficients * x = rhs for nonnegative odds x. Square systems are solved
// directly; overdetermined systems by least squares (float) or by a nonsingular
// subset whose solution must satisfy every equation exactly (rational).
// Errors: SingularSystem (magnitude attached), NegativeOdds, InconsistentObservables.
template <class T>
std::vector<T> solve_linear_odds(const Rows<T>& coefficients, const std::vector<T>& rhs, const Tolerances& tol = {}) {
    const std::size_t m = coefficients.size();
    const std::size_t k = m ? coefficients[0].size() : 0;
    if (m != rhs.size()) throw Error(ErrorKind::SingularSystem, "rhs length mismatch");
    auto probe = probe_rank(coefficients, k, tol.det);
    if (!probe.fullRank)
        throw Error(ErrorKind::SingularSystem,
                    m < k ? "fewer equations than unknowns" : "coefficient matrix is rank deficient", probe.magnitude);
    std::vector<T> x;
    if (m == k) {
        x = solve_square(coefficients, rhs);
    } else if constexpr (Num<T>::exact) {
        Rows<T> sub;
        std::vector<T> sb;
        for (auto r : probe.best) {
            sub.push_back(coefficients[r]);
            sb.push_back(rhs[r]);
        }
        x = solve_square(sub, sb);
        for (std::size_t r = 0; r < m; ++r) {
            T lhs(0);
            for (std::size_t c = 0; c < k; ++c) lhs += coefficients[r][c] * x[c];
            if (lhs != rhs[r]) throw Error(ErrorKind::InconsistentObservables, "overdetermined odds system has no exact solution");
        }
    } else {
        x = least_squares(coefficients, rhs);
    }
    for (auto& v : x) {
        if (is_negative(v, tol.prob)) throw Error(ErrorKind::NegativeOdds, "solved odds " + format(v) + " < 0");
        v = clamp_nonneg(v);
    }
    return x;
}

}  // namespace ivmnar
