#include "ivmnar/identify.hpp"

#include "ivmnar/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ivmnar {

bool ConditionReport::all_pass() const {
    if (!identifiable || !sidednessOk || !supportOk || !stoppedAt.empty()) return false;
    for (const auto& p : positivity)
        if (!p.pass) return false;
    for (const auto& d : dependence)
        if (!d.pass) return false;
    return true;
}

namespace {

template <class T> using Vec = std::vector<T>;
template <class T> using Cells2 = std::array<std::array<T, 2>, 2>;

template <class T> T sum(const Vec<T>& v) {
    T s(0);
    for (const auto& x : v) s += x;
    return s;
}

template <class T> Vec<T> scaled(const Vec<T>& v, const T& k) {
    Vec<T> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * k;
    return out;
}

std::string zs(int z) { return "Z=" + std::to_string(z); }
std::string zds(int z, int d) { return "Z=" + std::to_string(z) + ", D=" + std::to_string(d); }

template <class T> double max_abs(const Vec<T>& v) {
    double m = 0;
    for (const auto& x : v) m = std::max(m, std::fabs(to_double(x)));
    return m;
}

// Per-recipe working state: observable accessors plus the running record of
// positivity verdicts, dependence diagnostics and solved nuisances.
template <class T> class Engine {
public:
    Engine(const ObservableDistribution<T>& obs, const Tolerances& t, bool reportOnly)
        : o(obs), tol(t), report(reportOnly), ny(obs.ny()) {}

    const ObservableDistribution<T>& o;
    Tolerances tol;
    bool report;
    std::size_t ny;
    std::vector<Diagnostic> diagnostics;
    std::vector<PositivityVerdict> positivity;
    std::vector<std::pair<std::string, T>> nuisance;

    const Vec<T>& F(int z, int d) const { return o.arm[z].full[d]; }
    const Vec<T>& MD(int z) const { return o.arm[z].dMissing; }
    const T& MY(int z, int d) const { return o.arm[z].yMissing[d]; }
    const T& MB(int z) const { return o.arm[z].bothMissing; }
    T sumF(int z, int d) const { return sum(F(z, d)); }
    // P(D=d, R^D=1 | Z=z)
    T PDR(int z, int d) const { return sumF(z, d) + MY(z, d); }
    bool exists(int z, int d) const { return !(o.oneSided && z == 0 && d == 1); }
    std::string yl(std::size_t y) const { return "Y=" + format(o.ySupport[y]); }

    bool positive(const std::string& label, const T& mass) {
        bool ok = is_positive(mass, tol.prob);
        positivity.push_back({label, to_double(mass), ok});
        if (!ok && !report) throw Error(ErrorKind::PositivityViolated, label + " (implied mass " + format(mass) + ")");
        return ok;
    }

    Vec<T> solve(const std::string& label, const Rows<T>& rows, const Vec<T>& rhs) {
        const std::size_t k = rows.empty() ? 0 : rows[0].size();
        auto probe = probe_rank(rows, k, tol.det);
        diagnostics.push_back({label, probe.magnitude, Num<T>::exact ? 0.0 : tol.det, probe.fullRank});
        if (!probe.fullRank)
            throw Error(ErrorKind::DependenceViolated, label + " fails (magnitude " + format(probe.magnitude) + ")",
                        probe.magnitude);
        try {
            return solve_linear_odds(rows, rhs, tol);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::SingularSystem) throw Error(ErrorKind::DependenceViolated, label, e.magnitude());
            if (e.kind() == ErrorKind::NegativeOdds || e.kind() == ErrorKind::InconsistentObservables)
                throw Error(ErrorKind::InconsistentObservables, label + ": " + e.detail());
            throw;
        }
    }

    // t = lam*a + (1-lam)*b; returns lam.
    T mixture(const std::string& label, const Vec<T>& a, const Vec<T>& b, const Vec<T>& t) {
        Vec<T> diff(a.size());
        for (std::size_t y = 0; y < a.size(); ++y) diff[y] = a[y] - b[y];
        double scale = std::max(max_abs(a), max_abs(b));
        double mag = scale > 0 ? max_abs(diff) / scale : 0.0;
        bool ok;
        if constexpr (Num<T>::exact) {
            ok = std::any_of(diff.begin(), diff.end(), [](const T& x) { return x != 0; });
        } else {
            ok = mag >= tol.det;
        }
        diagnostics.push_back({label, mag, Num<T>::exact ? 0.0 : tol.det, ok});
        if (!ok) throw Error(ErrorKind::DependenceViolated, label + " fails (magnitude " + format(mag) + ")", mag);
        T lam(0);
        if constexpr (Num<T>::exact) {
            std::size_t i = 0;
            while (diff[i] == 0) ++i;
            lam = (t[i] - b[i]) / diff[i];
            for (std::size_t y = 0; y < a.size(); ++y)
                if (t[y] - b[y] != lam * diff[y])
                    throw Error(ErrorKind::InconsistentObservables, label + ": mixture equations disagree");
        } else {
            T num(0), den(0);
            for (std::size_t y = 0; y < a.size(); ++y) {
                num += diff[y] * (t[y] - b[y]);
                den += diff[y] * diff[y];
            }
            lam = num / den;
        }
        if (is_negative(lam, tol.prob)) throw Error(ErrorKind::InconsistentObservables, "mixture weight " + format(lam) + " < 0");
        lam = clamp_nonneg(lam);
        if (!is_positive(T(T(1) - lam), tol.prob)) throw Error(ErrorKind::ZeroFirstStage, "no compliers (mixture weight " + format(lam) + ")");
        note("P(U=n | Z=1)", lam);
        return lam;
    }

    // (t - lam*g) / (1 - lam): the complier law left after removing the never-takers
    Vec<T> unmix(const T& lam, const Vec<T>& g, const Vec<T>& t) {
        Vec<T> out(t.size());
        for (std::size_t y = 0; y < t.size(); ++y) out[y] = (t[y] - lam * g[y]) / (T(1) - lam);
        return nonneg("complier law at D=0", std::move(out));
    }

    Vec<T> strip(const std::string& label, const Vec<T>& arm, const Vec<T>& cp, const T& adj) {
        try {
            return strip_stratum(arm, cp, adj, tol);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NegativeStratumMass)
                throw Error(ErrorKind::InconsistentObservables, label + ": " + e.detail());
            throw;
        }
    }

    Vec<T> nonneg(const std::string& label, Vec<T> v) const {
        for (auto& x : v) {
            if (is_negative(x, tol.prob)) throw Error(ErrorKind::InconsistentObservables, label + " has negative mass " + format(x));
            x = clamp_nonneg(x);
        }
        return v;
    }

    Vec<T> normalize(const std::string& label, const Vec<T>& v) {
        T s = sum(v);
        if (!positive(label, s)) return Vec<T>(v.size(), T(0));
        return scaled(v, T(T(1) / s));
    }

    void note(const std::string& name, const T& v) { nuisance.emplace_back(name, v); }
    void note(const std::string& name, const Vec<T>& v) {
        for (std::size_t y = 0; y < v.size(); ++y) note(name + "[" + yl(y) + "]", v[y]);
    }
};

template <class T> struct Recovered {
    std::optional<ArmTable<T>> q;                   // reconstructed P(D,Y|Z)
    std::optional<std::array<Vec<T>, 2>> complier;  // P(Y | c, d), d = 0, 1
    bool meansUnidentified = false;                 // equal complier ratios: CACE 0
    std::optional<std::array<T, 3>> shares;         // P(U=u), by ComplianceType
    std::optional<Vec<T>> lawA, lawN;
    std::string jointFailure;
};

template <class T> Recovered<T> from_table(const ArmTable<T>& q) {
    Recovered<T> r;
    r.q = q;
    return r;
}

template <class T> ArmTable<T> zero_table(std::size_t ny) {
    ArmTable<T> q;
    for (auto& a : q)
        for (auto& v : a) v.assign(ny, T(0));
    return q;
}

// ---------------------------------------------------------------------------
// ratio step for the U-Y mechanisms (binary Y)

template <class T> void ratio_into(Engine<T>& e, Recovered<T>& r, const Vec<T>& c0, const Vec<T>& c1raw, const T& k) {
    Vec<T> c1 = scaled(c1raw, T(T(1) / k));
    for (std::size_t y = 0; y < 2; ++y) e.positive("complier response at " + e.yl(y), T(c0[y] + c1[y]));
    if (is_positive(c1[0], e.tol.prob) && is_positive(c1[1], e.tol.prob)) {
        auto s = solve_binary_ratio(T(c0[1] / c1[1]), T(c0[0] / c1[0]), e.tol);
        if (!s.meansIdentified) {
            r.meansUnidentified = true;
            return;
        }
        r.complier = std::array<Vec<T>, 2>{Vec<T>{T(T(1) - s.p0), s.p0}, Vec<T>{T(T(1) - s.p1), s.p1}};
        return;
    }
    // a zero cell on the D=1 side: sum_y c_d(y) t_y = 1 with t_y the inverse response scale
    Rows<T> rows{c0, c1};
    auto probe = probe_rank(rows, 2, e.tol.det);
    if (!probe.fullRank) {
        r.meansUnidentified = true;
        return;
    }
    auto t = solve_square(rows, Vec<T>{T(1), T(1)});
    Vec<T> l0(2), l1(2);
    for (std::size_t y = 0; y < 2; ++y) {
        l0[y] = c0[y] * t[y];
        l1[y] = c1[y] * t[y];
    }
    r.complier = std::array<Vec<T>, 2>{e.nonneg("P(Y | c, 0)", l0), e.nonneg("P(Y | c, 1)", l1)};
}

// ---------------------------------------------------------------------------
// outcome-missing step, shared by the R^Y-only regime and the reductions of the
// two-indicator mechanisms

enum class OutcomeKind { ZD, UD, DY, ZY, UY, Y };

OutcomeKind outcome_kind(const std::string& letters) {
    if (letters == "ZD") return OutcomeKind::ZD;
    if (letters == "UD") return OutcomeKind::UD;
    if (letters == "DY") return OutcomeKind::DY;
    if (letters == "ZY") return OutcomeKind::ZY;
    if (letters == "UY") return OutcomeKind::UY;
    if (letters == "Y") return OutcomeKind::Y;
    throw Error(ErrorKind::MechanismNotIdentifiable, "no outcome recipe for R^Y parents " + letters);
}

// P(D=d, Y=y, R^Y=1 | Z=z) and P(D=d, R^Y=0 | Z=z), possibly rescaled
template <class T> struct OutcomeView {
    ArmTable<T> f;
    Cells2<T> my;
};

template <class T> OutcomeView<T> raw_view(const Engine<T>& e) {
    OutcomeView<T> v;
    for (int z = 0; z < 2; ++z)
        for (int d = 0; d < 2; ++d) {
            v.f[z][d] = e.F(z, d);
            v.my[z][d] = e.MY(z, d);
        }
    return v;
}

template <class T> struct OutcomeStage {
    std::optional<ArmTable<T>> q;
    std::array<Vec<T>, 2> c;  // complier cells before normalization (UD, UY)
};

template <class T>
OutcomeStage<T> outcome_stage(Engine<T>& e, OutcomeKind kind, const OutcomeView<T>& v, const std::string& tag) {
    OutcomeStage<T> st;
    const std::size_t ny = e.ny;
    auto odds_table = [&](auto&& eta_for) {
        ArmTable<T> q = zero_table<T>(ny);
        for (int z = 0; z < 2; ++z)
            for (int d = 0; d < 2; ++d) {
                if (!e.exists(z, d)) continue;
                const Vec<T>& eta = eta_for(z, d);
                for (std::size_t y = 0; y < ny; ++y) q[z][d][y] = v.f[z][d][y] * (T(1) + eta[y]);
            }
        return q;
    };
    switch (kind) {
        case OutcomeKind::ZD: {
            ArmTable<T> q = zero_table<T>(ny);
            for (int z = 0; z < 2; ++z)
                for (int d = 0; d < 2; ++d) {
                    if (!e.exists(z, d)) continue;
                    T sf = sum(v.f[z][d]);
                    T pdr = sf + v.my[z][d];
                    if (is_zero(pdr, e.tol.prob)) continue;
                    if (!e.positive("P(R^Y=1 | " + zds(z, d) + tag + ") > 0", sf)) continue;
                    q[z][d] = scaled(v.f[z][d], T(pdr / sf));
                    e.note("P(R^Y=1 | " + zds(z, d) + tag + ")", T(sf / pdr));
                }
            st.q = q;
            break;
        }
        case OutcomeKind::UD:
        case OutcomeKind::UY:
            st.c[0] = e.strip("never-taker removal at Z=0, D=0", v.f[0][0], v.f[1][0], T(1));
            st.c[1] = e.strip("always-taker removal at Z=1, D=1", v.f[1][1], v.f[0][1], T(1));
            break;
        case OutcomeKind::DY: {
            std::array<Vec<T>, 2> eta;
            for (int d = 0; d < 2; ++d) {
                Rows<T> rows;
                Vec<T> rhs;
                for (int z = 0; z < 2; ++z)
                    if (e.exists(z, d)) {
                        rows.push_back(v.f[z][d]);
                        rhs.push_back(v.my[z][d]);
                    }
                eta[d] = e.solve("dep(Y, Z | D=" + std::to_string(d) + tag + ")", rows, rhs);
                e.note("eta(D=" + std::to_string(d) + ")", eta[d]);
            }
            st.q = odds_table([&](int, int d) -> const Vec<T>& { return eta[d]; });
            break;
        }
        case OutcomeKind::ZY: {
            std::array<Vec<T>, 2> eta;
            for (int z = 0; z < 2; ++z) {
                Rows<T> rows;
                Vec<T> rhs;
                for (int d = 0; d < 2; ++d)
                    if (e.exists(z, d)) {
                        rows.push_back(v.f[z][d]);
                        rhs.push_back(v.my[z][d]);
                    }
                eta[z] = e.solve("dep(Y, D | " + zs(z) + tag + ")", rows, rhs);
                e.note("eta(" + zs(z) + ")", eta[z]);
            }
            st.q = odds_table([&](int z, int) -> const Vec<T>& { return eta[z]; });
            break;
        }
        case OutcomeKind::Y: {
            Rows<T> rows;
            Vec<T> rhs;
            for (int z = 0; z < 2; ++z)
                for (int d = 0; d < 2; ++d)
                    if (e.exists(z, d)) {
                        rows.push_back(v.f[z][d]);
                        rhs.push_back(v.my[z][d]);
                    }
            Vec<T> eta = e.solve("dep(Y, (Z,D)" + tag + ")", rows, rhs);
            e.note("eta", eta);
            st.q = odds_table([&](int, int) -> const Vec<T>& { return eta; });
            break;
        }
    }
    return st;
}

// Shares and never-/always-taker laws from an outcome view that is a genuine
// P(D, Y, R^Y | Z) table.
template <class T> void strata_from_view(Engine<T>& e, Recovered<T>& r, const OutcomeView<T>& v) {
    T pn = sum(v.f[1][0]) + v.my[1][0];
    T pa = sum(v.f[0][1]) + v.my[0][1];
    r.shares = std::array<T, 3>{pa, T(T(1) - pn - pa), pn};
    auto law = [&](const Vec<T>& cells, const T& share, const char* who) -> std::optional<Vec<T>> {
        if (is_zero(share, e.tol.prob)) return Vec<T>(e.ny, T(0));
        T s = sum(cells);
        if (!is_positive(s, e.tol.prob)) {
            r.jointFailure = std::string(who) + " outcomes are never observed";
            return std::nullopt;
        }
        return scaled(cells, T(T(1) / s));
    };
    r.lawN = law(v.f[1][0], pn, "never-taker");
    r.lawA = law(v.f[0][1], pa, "always-taker");
}

template <class T>
Recovered<T> outcome_full(Engine<T>& e, OutcomeKind kind, const OutcomeView<T>& v, const std::string& tag) {
    auto st = outcome_stage(e, kind, v, tag);
    Recovered<T> r;
    if (st.q) {
        r.q = st.q;
        return r;
    }
    if (kind == OutcomeKind::UY) {
        ratio_into(e, r, st.c[0], st.c[1], T(1));
        r.jointFailure = "joint not identified";
        return r;
    }
    r.complier = std::array<Vec<T>, 2>{e.normalize("P(R^Y=1 | U=c, D=0" + tag + ") > 0", st.c[0]),
                                       e.normalize("P(R^Y=1 | U=c, D=1" + tag + ") > 0", st.c[1])};
    strata_from_view(e, r, v);
    return r;
}

// ---------------------------------------------------------------------------
// treatment-missing recipes

template <class T> Recovered<T> complete_case(Engine<T>& e, const char* what) {
    ArmTable<T> q = zero_table<T>(e.ny);
    for (int z = 0; z < 2; ++z) {
        T s = e.sumF(z, 0) + e.sumF(z, 1);
        if (!e.positive(std::string(what) + " > 0 at " + zs(z), s)) continue;
        for (int d = 0; d < 2; ++d) q[z][d] = scaled(e.F(z, d), T(T(1) / s));
    }
    return from_table(q);
}

template <class T> Recovered<T> r_2ZY(Engine<T>& e) {
    ArmTable<T> q = zero_table<T>(e.ny);
    for (int z = 0; z < 2; ++z)
        for (std::size_t y = 0; y < e.ny; ++y) {
            T obs = e.F(z, 0)[y] + e.F(z, 1)[y];
            T all = obs + e.MD(z)[y];
            if (is_zero(all, e.tol.prob)) continue;
            if (!e.positive("P(R^D=1 | " + zs(z) + ", " + e.yl(y) + ") > 0", obs)) continue;
            for (int d = 0; d < 2; ++d) q[z][d][y] = e.F(z, d)[y] * all / obs;
        }
    return from_table(q);
}

template <class T> Recovered<T> r_2DY(Engine<T>& e) {
    ArmTable<T> q = zero_table<T>(e.ny);
    for (std::size_t y = 0; y < e.ny; ++y) {
        Rows<T> rows;
        Vec<T> rhs;
        for (int z = 0; z < 2; ++z) {
            rows.push_back({e.F(z, 0)[y], e.exists(z, 1) ? e.F(z, 1)[y] : T(0)});
            rhs.push_back(e.MD(z)[y]);
        }
        Vec<T> zeta = e.solve("dep(D, Z | " + e.yl(y) + ")", rows, rhs);
        e.note("zeta(" + e.yl(y) + ", D=0)", zeta[0]);
        e.note("zeta(" + e.yl(y) + ", D=1)", zeta[1]);
        for (int z = 0; z < 2; ++z)
            for (int d = 0; d < 2; ++d) q[z][d][y] = e.F(z, d)[y] * (T(1) + zeta[d]);
    }
    return from_table(q);
}

// zeta_z(d) from rows over y (and optionally the extra R^Y=0 row)
template <class T>
Vec<T> zeta_zd(Engine<T>& e, int z, const std::array<Vec<T>, 2>& cells, const Vec<T>& rhs, const std::string& label,
               const std::optional<std::pair<std::array<T, 2>, T>>& extra = std::nullopt) {
    std::vector<int> cols;
    for (int d = 0; d < 2; ++d)
        if (e.exists(z, d)) cols.push_back(d);
    Rows<T> rows;
    Vec<T> b;
    for (std::size_t y = 0; y < e.ny; ++y) {
        Vec<T> row;
        for (int d : cols) row.push_back(cells[d][y]);
        rows.push_back(row);
        b.push_back(rhs[y]);
    }
    if (extra) {
        Vec<T> row;
        for (int d : cols) row.push_back(extra->first[d]);
        rows.push_back(row);
        b.push_back(extra->second);
    }
    Vec<T> sol = e.solve(label, rows, b);
    Vec<T> zeta(2, T(0));
    for (std::size_t i = 0; i < cols.size(); ++i) {
        zeta[cols[i]] = sol[i];
        e.note("zeta(" + zds(z, cols[i]) + ")", sol[i]);
    }
    return zeta;
}

template <class T> Recovered<T> r_2ZD(Engine<T>& e) {
    ArmTable<T> q = zero_table<T>(e.ny);
    for (int z = 0; z < 2; ++z) {
        Vec<T> zeta = zeta_zd(e, z, {e.F(z, 0), e.F(z, 1)}, e.MD(z), "dep(Y, D | " + zs(z) + ")");
        for (int d = 0; d < 2; ++d)
            if (e.exists(z, d)) q[z][d] = scaled(e.F(z, d), T(T(1) + zeta[d]));
    }
    return from_table(q);
}

template <class T> Recovered<T> r_2UY(Engine<T>& e) {
    Recovered<T> r;
    Vec<T> c0 = e.strip("never-taker removal at Z=0, D=0", e.F(0, 0), e.F(1, 0), T(1));
    Vec<T> c1 = e.strip("always-taker removal at Z=1, D=1", e.F(1, 1), e.F(0, 1), T(1));
    ratio_into(e, r, c0, c1, T(1));
    if (!e.o.oneSided) {
        r.jointFailure = "joint not identified with two-sided noncompliance";
        return r;
    }
    // one-sided: per y, MD(1) = F10 zeta_n + F11 zeta_c and MD(0) = F10 zeta_n + C0 zeta_c
    Vec<T> n(e.ny), k0(e.ny), k1(e.ny);
    for (std::size_t y = 0; y < e.ny; ++y) {
        Rows<T> rows{{e.F(1, 0)[y], e.F(1, 1)[y]}, {e.F(1, 0)[y], c0[y]}};
        Vec<T> zeta;
        try {
            zeta = solve_linear_odds(rows, Vec<T>{e.MD(1)[y], e.MD(0)[y]}, e.tol);
        } catch (const Error& err) {
            r.jointFailure = "response odds at " + e.yl(y) + " not identified (needs P(Y|c,0) != P(Y|c,1)): " + err.detail();
            return r;
        }
        n[y] = e.F(1, 0)[y] * (T(1) + zeta[0]);
        k1[y] = e.F(1, 1)[y] * (T(1) + zeta[1]);
        k0[y] = c0[y] * (T(1) + zeta[1]);
    }
    T pn = sum(n), pc = sum(k1);
    r.shares = std::array<T, 3>{T(0), pc, pn};
    r.lawA = Vec<T>(e.ny, T(0));
    r.lawN = is_positive(pn, e.tol.prob) ? scaled(n, T(T(1) / pn)) : Vec<T>(e.ny, T(0));
    return r;
}

template <class T> Recovered<T> r_2UD(Engine<T>& e) {
    Recovered<T> r;
    std::array<Vec<T>, 2> c = {e.strip("never-taker removal at Z=0, D=0", e.F(0, 0), e.F(1, 0), T(1)),
                               e.strip("always-taker removal at Z=1, D=1", e.F(1, 1), e.F(0, 1), T(1))};
    r.complier = std::array<Vec<T>, 2>{e.normalize("P(R^D=1 | U=c, D=0) > 0", c[0]),
                                       e.normalize("P(R^D=1 | U=c, D=1) > 0", c[1])};
    // MD(z,y) = F10 zeta(n) + F01 zeta(a) + C_z zeta(c, z)
    const bool two = !e.o.oneSided;
    Rows<T> rows;
    Vec<T> rhs;
    for (int z = 0; z < 2; ++z)
        for (std::size_t y = 0; y < e.ny; ++y) {
            Vec<T> row{e.F(1, 0)[y]};
            if (two) row.push_back(e.F(0, 1)[y]);
            row.push_back(z == 0 ? c[0][y] : T(0));
            row.push_back(z == 1 ? c[1][y] : T(0));
            rows.push_back(row);
            rhs.push_back(e.MD(z)[y]);
        }
    Vec<T> zeta;
    try {
        zeta = solve_linear_odds(rows, rhs, e.tol);
    } catch (const Error& err) {
        r.jointFailure = "treatment response odds not identified: " + err.detail();
        return r;
    }
    T zn = zeta[0], za = two ? zeta[1] : T(0), zc1 = zeta.back();
    Vec<T> n = scaled(e.F(1, 0), T(T(1) + zn)), a = scaled(e.F(0, 1), T(T(1) + za));
    T pn = sum(n), pa = sum(a), pc = sum(c[1]) * (T(1) + zc1);
    r.shares = std::array<T, 3>{pa, pc, pn};
    r.lawN = is_positive(pn, e.tol.prob) ? scaled(n, T(T(1) / pn)) : Vec<T>(e.ny, T(0));
    r.lawA = is_positive(pa, e.tol.prob) ? scaled(a, T(T(1) / pa)) : Vec<T>(e.ny, T(0));
    return r;
}

template <class T> Recovered<T> r_2ZU(Engine<T>& e) {
    Recovered<T> r;
    Vec<T> gn = e.normalize("P(R^D=1 | Z=1, U=n) > 0", e.F(1, 0));
    Vec<T> gc1 = e.normalize("P(R^D=1 | Z=1, U=c) > 0", e.F(1, 1));
    Vec<T> t1(e.ny), t0(e.ny);
    for (std::size_t y = 0; y < e.ny; ++y) {
        t1[y] = e.F(1, 0)[y] + e.F(1, 1)[y] + e.MD(1)[y];
        t0[y] = e.F(0, 0)[y] + e.MD(0)[y];
    }
    T lam = e.mixture("dep(Y, U | Z=1)", gn, gc1, t1);
    r.complier = std::array<Vec<T>, 2>{e.normalize("complier law at D=0", e.unmix(lam, gn, t0)), gc1};
    r.shares = std::array<T, 3>{T(0), T(T(1) - lam), lam};
    r.lawN = gn;
    r.lawA = Vec<T>(e.ny, T(0));
    return r;
}

// ---------------------------------------------------------------------------
// both indicators

// R^D on (U,D), R^Y on (X, R^D): the R^D=1 slice is an outcome problem on a
// population thinned by P(R^D=1 | U, D), which stratum subtraction tolerates.
template <class T> Recovered<T> r_thinned_ud(Engine<T>& e, OutcomeKind kind) {
    const std::string tag = ", R^D=1";
    auto v = raw_view(e);
    auto st = outcome_stage(e, kind, v, tag);
    Recovered<T> r;
    r.jointFailure = "compliance shares are not identified under this mechanism";
    std::array<Vec<T>, 2> c = st.c;
    if (st.q) {
        const auto& q = *st.q;
        c[0] = e.strip("never-taker removal at Z=0, D=0", q[0][0], q[1][0], T(1));
        c[1] = e.strip("always-taker removal at Z=1, D=1", q[1][1], q[0][1], T(1));
    }
    if (kind == OutcomeKind::UY) {
        T den0 = e.PDR(0, 0) - e.PDR(1, 0), den1 = e.PDR(1, 1) - e.PDR(0, 1);
        e.positive("P(R^D=1 | U=c, D=0) > 0", den0);
        e.positive("P(R^D=1 | U=c, D=1) > 0", den1);
        e.note("P(U=c, R^D=1 | D=0)", den0);
        e.note("P(U=c, R^D=1 | D=1)", den1);
        ratio_into(e, r, c[0], c[1], T(den1 / den0));
        return r;
    }
    r.complier = std::array<Vec<T>, 2>{e.normalize("P(R^D=1 | U=c, D=0) > 0", c[0]),
                                       e.normalize("P(R^D=1 | U=c, D=1) > 0", c[1])};
    return r;
}

// R^D on (Z,D), R^Y not on R^D: reweighting the R^D=1 cells by 1/P(R^D=1|Z,D)
// yields an ordinary outcome-missing table.
template <class T> Recovered<T> r_augmented_zd(Engine<T>& e, OutcomeKind kind) {
    OutcomeView<T> v;
    for (int z = 0; z < 2; ++z) {
        Vec<T> zeta = zeta_zd(e, z, {e.F(z, 0), e.F(z, 1)}, e.MD(z), "dep(Y+, D | " + zs(z) + "), Y+ = (Y*R^Y, R^Y)",
                              std::optional<std::pair<std::array<T, 2>, T>>({{e.MY(z, 0), e.MY(z, 1)}, e.MB(z)}));
        for (int d = 0; d < 2; ++d) {
            v.f[z][d] = scaled(e.F(z, d), T(T(1) + zeta[d]));
            v.my[z][d] = e.MY(z, d) * (T(1) + zeta[d]);
        }
    }
    return outcome_full(e, kind, v, "");
}

// R^D on Z only: divide the R^D=1 slice by P(R^D=1 | Z).
template <class T> Recovered<T> r_scaled_z(Engine<T>& e, OutcomeKind kind) {
    OutcomeView<T> v;
    for (int z = 0; z < 2; ++z) {
        T rho = e.PDR(z, 0) + e.PDR(z, 1);
        e.positive("P(R^D=1 | " + zs(z) + ") > 0", rho);
        e.note("P(R^D=1 | " + zs(z) + ")", rho);
        T inv = is_positive(rho, e.tol.prob) ? T(T(1) / rho) : T(0);
        for (int d = 0; d < 2; ++d) {
            v.f[z][d] = scaled(e.F(z, d), inv);
            v.my[z][d] = e.MY(z, d) * inv;
        }
    }
    return outcome_full(e, kind, v, ", R^D=1");
}

// R^D on (Z,U), one-sided
template <class T> Recovered<T> r_mixture_zu(Engine<T>& e, OutcomeKind kind) {
    Recovered<T> r;
    e.positive("P(R^D=1 | Z=1, U=n) > 0", e.PDR(1, 0));
    e.positive("P(R^D=1 | Z=1, U=c) > 0", e.PDR(1, 1));
    Vec<T> t1(e.ny), t0(e.ny);
    for (std::size_t y = 0; y < e.ny; ++y) {
        t1[y] = e.F(1, 0)[y] + e.F(1, 1)[y] + e.MD(1)[y];
        t0[y] = e.F(0, 0)[y] + e.MD(0)[y];
    }
    if (kind == OutcomeKind::ZD) {
        T r10 = e.sumF(1, 0) / e.PDR(1, 0), r11 = e.sumF(1, 1) / e.PDR(1, 1);
        Vec<T> gn = e.normalize("P(R^Y=1 | Z=1, D=0) > 0", e.F(1, 0));
        Vec<T> gc1 = e.normalize("P(R^Y=1 | Z=1, D=1) > 0", e.F(1, 1));
        e.positive("P(R^Y=1 | Z=0, D=0) > 0", e.sumF(0, 0));
        T r00 = e.sumF(0, 0) / e.PDR(0, 0);
        e.note("P(R^Y=1 | Z=1, D=0)", r10);
        e.note("P(R^Y=1 | Z=1, D=1)", r11);
        e.note("P(R^Y=1 | Z=0, D=0)", r00);
        T lam = e.mixture("dep(Y, U | Z=1)", scaled(gn, r10), scaled(gc1, r11), t1);
        r.complier = std::array<Vec<T>, 2>{e.normalize("complier law at D=0", e.unmix(lam, gn, scaled(t0, T(T(1) / r00)))), gc1};
        r.shares = std::array<T, 3>{T(0), T(T(1) - lam), lam};
        r.lawN = gn;
        r.lawA = Vec<T>(e.ny, T(0));
        return r;
    }
    Vec<T> hn = scaled(e.F(1, 0), T(T(1) / e.PDR(1, 0)));
    Vec<T> hc1 = scaled(e.F(1, 1), T(T(1) / e.PDR(1, 1)));
    T lam = e.mixture("dep(Y, U | Z=1)", hn, hc1, t1);
    Vec<T> hc0 = e.unmix(lam, hn, t0);
    if (kind == OutcomeKind::UY) {
        ratio_into(e, r, hc0, hc1, T(1));
        r.jointFailure = "joint not identified";
        return r;
    }
    r.complier = std::array<Vec<T>, 2>{e.normalize("P(R^Y=1 | U=c, D=0) > 0", hc0),
                                       e.normalize("P(R^Y=1 | U=c, D=1) > 0", e.F(1, 1))};
    r.shares = std::array<T, 3>{T(0), T(T(1) - lam), lam};
    r.lawN = e.normalize("P(R^Y=1 | U=n, D=0) > 0", e.F(1, 0));
    r.lawA = Vec<T>(e.ny, T(0));
    return r;
}

// P(R^Y=1 | Z=z, R^D=r): (observed, total) masses of arm z with R^D = r
template <class T> std::pair<T, T> ry_by_rd(const Engine<T>& e, int z, int rd) {
    if (rd == 1) {
        T obs = e.sumF(z, 0) + e.sumF(z, 1);
        return {obs, T(obs + e.MY(z, 0) + e.MY(z, 1))};
    }
    T obs = sum(e.MD(z));
    return {obs, T(obs + e.MB(z))};
}

template <class T> Recovered<T> r_1Z_2ZD(Engine<T>& e) {
    ArmTable<T> q = zero_table<T>(e.ny);
    for (int z = 0; z < 2; ++z) {
        auto [o1, t1] = ry_by_rd(e, z, 1);
        e.positive("P(R^Y=1 | " + zs(z) + ", R^D=1) > 0", o1);
        T rY1 = o1 / t1;
        e.note("P(R^Y=1 | " + zs(z) + ", R^D=1)", rY1);
        Vec<T> zeta(2, T(0));
        auto [o0, t0] = ry_by_rd(e, z, 0);
        if (!is_zero(t0, e.tol.prob)) {
            e.positive("P(R^Y=1 | " + zs(z) + ", R^D=0) > 0", o0);
            T rY0 = o0 / t0;
            e.note("P(R^Y=1 | " + zs(z) + ", R^D=0)", rY0);
            zeta = zeta_zd(e, z, {e.F(z, 0), e.F(z, 1)}, scaled(e.MD(z), T(rY1 / rY0)), "dep(Y, D | " + zs(z) + ")");
        }
        for (int d = 0; d < 2; ++d)
            if (e.exists(z, d)) q[z][d] = scaled(e.F(z, d), T((T(1) + zeta[d]) / rY1));
    }
    return from_table(q);
}

template <class T> Recovered<T> r_1D_2ZD(Engine<T>& e) {
    const T w[2] = {T(1) - e.o.pZ, e.o.pZ};
    T rY1[2];
    for (int d = 0; d < 2; ++d) {
        T num(0), den(0);
        for (int z = 0; z < 2; ++z)
            if (e.exists(z, d)) {
                num += w[z] * e.sumF(z, d);
                den += w[z] * e.PDR(z, d);
            }
        e.positive("P(R^Y=1 | D=" + std::to_string(d) + ", R^D=1) > 0", num);
        rY1[d] = is_positive(num, e.tol.prob) ? T(num / den) : T(1);
        e.note("P(R^Y=1 | D=" + std::to_string(d) + ", R^D=1)", rY1[d]);
    }
    // x_z(d) = zeta_z(d) * P(R^Y=1 | d, R^D=0)
    std::array<Vec<T>, 2> x;
    for (int z = 0; z < 2; ++z)
        x[z] = zeta_zd(e, z, {scaled(e.F(z, 0), T(T(1) / rY1[0])), scaled(e.F(z, 1), T(T(1) / rY1[1]))}, e.MD(z),
                       "dep(Y, D | " + zs(z) + ")");
    Rows<T> rows;
    Vec<T> rhs;
    for (int z = 0; z < 2; ++z) {
        rows.push_back({x[z][0] * e.PDR(z, 0), e.exists(z, 1) ? T(x[z][1] * e.PDR(z, 1)) : T(0)});
        rhs.push_back(sum(e.MD(z)) + e.MB(z));
    }
    Vec<T> inv = e.solve("dep(D, Z)", rows, rhs);  // 1 / P(R^Y=1 | d, R^D=0)
    for (int d = 0; d < 2; ++d)
        if (is_positive(inv[d], e.tol.prob)) e.note("P(R^Y=1 | D=" + std::to_string(d) + ", R^D=0)", T(T(1) / inv[d]));
    ArmTable<T> q = zero_table<T>(e.ny);
    for (int z = 0; z < 2; ++z)
        for (int d = 0; d < 2; ++d)
            if (e.exists(z, d)) q[z][d] = scaled(e.F(z, d), T((T(1) + x[z][d] * inv[d]) / rY1[d]));
    return from_table(q);
}

// eta(y) on the R^D=1 cells and xi(y) on the R^D=0 cells
template <class T> std::pair<Vec<T>, Vec<T>> eta_xi(Engine<T>& e) {
    Rows<T> rows;
    Vec<T> rhs;
    for (int z = 0; z < 2; ++z)
        for (int d = 0; d < 2; ++d)
            if (e.exists(z, d)) {
                rows.push_back(e.F(z, d));
                rhs.push_back(e.MY(z, d));
            }
    Vec<T> eta = e.solve("dep(Y, (Z,D) | R^D=1)", rows, rhs);
    e.note("eta(R^D=1)", eta);
    // no R^D=0 mass at all: xi only ever multiplies zeros, so there is nothing to solve
    bool noRd0 = true;
    for (int z = 0; z < 2; ++z) {
        noRd0 &= is_zero(e.MB(z), e.tol.prob);
        for (const auto& x : e.MD(z)) noRd0 &= is_zero(x, e.tol.prob);
    }
    if (noRd0) return {eta, Vec<T>(e.ny, T(0))};
    Rows<T> rows0{e.MD(0), e.MD(1)};
    Vec<T> xi = e.solve("dep(Y, Z | R^D=0)", rows0, Vec<T>{e.MB(0), e.MB(1)});
    e.note("xi(R^D=0)", xi);
    return {eta, xi};
}

template <class T> Vec<T> times_one_plus(const Vec<T>& v, const Vec<T>& odds) {
    Vec<T> out(v.size());
    for (std::size_t y = 0; y < v.size(); ++y) out[y] = v[y] * (T(1) + odds[y]);
    return out;
}

template <class T> Recovered<T> r_1Y_2ZD(Engine<T>& e) {
    auto [eta, xi] = eta_xi(e);
    ArmTable<T> q = zero_table<T>(e.ny);
    for (int z = 0; z < 2; ++z) {
        std::array<Vec<T>, 2> g = {times_one_plus(e.F(z, 0), eta), times_one_plus(e.F(z, 1), eta)};
        Vec<T> zeta = zeta_zd(e, z, g, times_one_plus(e.MD(z), xi), "dep(Y, D | " + zs(z) + ")");
        for (int d = 0; d < 2; ++d)
            if (e.exists(z, d)) q[z][d] = scaled(g[d], T(T(1) + zeta[d]));
    }
    return from_table(q);
}

template <class T> Recovered<T> finish_mixture(Engine<T>& e, const Vec<T>& gn, const Vec<T>& gc1, const Vec<T>& py1,
                                               const Vec<T>& py0) {
    Recovered<T> r;
    T lam = e.mixture("dep(Y, U | Z=1)", gn, gc1, py1);
    r.complier = std::array<Vec<T>, 2>{e.normalize("complier law at D=0", e.unmix(lam, gn, py0)), gc1};
    r.shares = std::array<T, 3>{T(0), T(T(1) - lam), lam};
    r.lawN = gn;
    r.lawA = Vec<T>(e.ny, T(0));
    return r;
}

template <class T> Recovered<T> r_1Z_2ZU(Engine<T>& e) {
    std::array<Vec<T>, 2> py;
    for (int z = 0; z < 2; ++z) {
        py[z].assign(e.ny, T(0));
        auto [o1, t1] = ry_by_rd(e, z, 1);
        e.positive("P(R^Y=1 | " + zs(z) + ", R^D=1) > 0", o1);
        T inv1 = t1 / o1;
        for (int d = 0; d < 2; ++d)
            for (std::size_t y = 0; y < e.ny; ++y) py[z][y] += e.F(z, d)[y] * inv1;
        auto [o0, t0] = ry_by_rd(e, z, 0);
        if (is_zero(t0, e.tol.prob)) continue;
        e.positive("P(R^Y=1 | " + zs(z) + ", R^D=0) > 0", o0);
        T inv0 = t0 / o0;
        for (std::size_t y = 0; y < e.ny; ++y) py[z][y] += e.MD(z)[y] * inv0;
    }
    Vec<T> gn = e.normalize("P(R^D=1 | Z=1, U=n) > 0", e.F(1, 0));
    Vec<T> gc1 = e.normalize("P(R^D=1 | Z=1, U=c) > 0", e.F(1, 1));
    return finish_mixture(e, gn, gc1, py[1], py[0]);
}

template <class T> Recovered<T> r_1U_2ZU(Engine<T>& e) {
    Recovered<T> r;
    e.positive("P(R^D=1 | Z=1, U=n) > 0", e.PDR(1, 0));
    // ratios P(R^D=1 | Z=0, u) / P(R^D=1 | Z=1, u)
    Rows<T> rows{{e.sumF(1, 0), e.sumF(1, 1)}, {e.MY(1, 0), e.MY(1, 1)}};
    Vec<T> k = e.solve("dep(R^Y, U | R^D=1)", rows, Vec<T>{e.sumF(0, 0), e.MY(0, 0)});
    e.note("R^D ratio Z=0/Z=1 (U=n)", k[0]);
    e.note("R^D ratio Z=0/Z=1 (U=c)", k[1]);
    Vec<T> c0 = e.strip("never-taker removal at Z=0, D=0", e.F(0, 0), e.F(1, 0), k[0]);
    r.complier = std::array<Vec<T>, 2>{e.normalize("P(R^D=1 | Z=0, U=c) > 0", c0),
                                       e.normalize("P(R^Y=1 | U=c, R^D=1) > 0", e.F(1, 1))};
    r.jointFailure = "compliance shares are not identified under this mechanism";
    return r;
}

template <class T> Recovered<T> r_1D_2ZU(Engine<T>& e) {
    Recovered<T> r;
    T rY1[2];
    for (int d = 0; d < 2; ++d) {
        e.positive("P(R^Y=1 | D=" + std::to_string(d) + ", R^D=1) > 0", e.sumF(1, d));
        rY1[d] = e.sumF(1, d) / e.PDR(1, d);
        e.note("P(R^Y=1 | D=" + std::to_string(d) + ", R^D=1)", rY1[d]);
    }
    Rows<T> rows;
    for (std::size_t y = 0; y < e.ny; ++y) rows.push_back({e.F(1, 0)[y] / rY1[0], e.F(1, 1)[y] / rY1[1]});
    Vec<T> v = e.solve("dep(Y, U | Z=1)", rows, e.MD(1));
    auto [o0, t0] = ry_by_rd(e, 0, 0);
    e.positive("P(R^Y=1 | D=0, R^D=0) > 0", o0);
    T rY00 = o0 / t0;
    e.note("P(R^Y=1 | D=0, R^D=0)", rY00);
    T lam = e.PDR(1, 0) * (T(1) + v[0] / rY00);
    e.note("P(U=n | Z=1)", lam);
    if (is_negative(T(T(1) - lam), e.tol.prob)) throw Error(ErrorKind::InconsistentObservables, "never-taker share exceeds 1");
    if (!is_positive(T(T(1) - lam), e.tol.prob)) throw Error(ErrorKind::ZeroFirstStage, "no compliers");
    Vec<T> py0(e.ny);
    for (std::size_t y = 0; y < e.ny; ++y) py0[y] = e.F(0, 0)[y] / rY1[0] + e.MD(0)[y] / rY00;
    Vec<T> gn = e.normalize("P(R^D=1 | Z=1, U=n) > 0", e.F(1, 0));
    r.complier = std::array<Vec<T>, 2>{e.normalize("complier law at D=0", e.unmix(lam, gn, py0)),
                                       e.normalize("P(R^D=1 | Z=1, U=c) > 0", e.F(1, 1))};
    r.shares = std::array<T, 3>{T(0), T(T(1) - lam), lam};
    r.lawN = gn;
    r.lawA = Vec<T>(e.ny, T(0));
    return r;
}

template <class T> Recovered<T> r_1Y_2ZU(Engine<T>& e) {
    auto [eta, xi] = eta_xi(e);
    std::array<Vec<T>, 2> py;
    for (int z = 0; z < 2; ++z) {
        py[z] = times_one_plus(e.MD(z), xi);
        for (int d = 0; d < 2; ++d) {
            Vec<T> g = times_one_plus(e.F(z, d), eta);
            for (std::size_t y = 0; y < e.ny; ++y) py[z][y] += g[y];
        }
    }
    Vec<T> gn = e.normalize("P(R^D=1 | Z=1, U=n) > 0", times_one_plus(e.F(1, 0), eta));
    Vec<T> gc1 = e.normalize("P(R^D=1 | Z=1, U=c) > 0", times_one_plus(e.F(1, 1), eta));
    return finish_mixture(e, gn, gc1, py[1], py[0]);
}

// ---------------------------------------------------------------------------

template <class T> Recovered<T> run_recipe(Engine<T>& e, const CatalogEntry& entry) {
    const auto& id = entry.spec.id;
    const auto& sp = entry.spec;
    if (id == "MCAR-Y") return complete_case(e, "P(R^Y=1)");
    if (id == "MCAR-D") return complete_case(e, "P(R^D=1)");
    switch (sp.regime) {
        case Regime::OutcomeOnly: return outcome_full(e, outcome_kind(sp.ryParents.letters()), raw_view(e), "");
        case Regime::TreatmentOnly: {
            const auto l = sp.rdParents.letters();
            if (l == "ZY") return r_2ZY(e);
            if (l == "UY") return r_2UY(e);
            if (l == "DY") return r_2DY(e);
            if (l == "UD") return r_2UD(e);
            if (l == "ZD") return r_2ZD(e);
            if (l == "ZU") return r_2ZU(e);
            break;
        }
        case Regime::Both: {
            const auto rd = sp.rdParents.letters();
            const auto ry = sp.ryParents.letters();
            const bool viaRD = sp.ryParents.has(Var::RD);
            if (rd == "UD" && viaRD) return r_thinned_ud(e, outcome_kind(ry));
            if (rd == "ZD" && !viaRD) return r_augmented_zd(e, outcome_kind(ry));
            if (rd == "ZU" && !viaRD) return r_mixture_zu(e, outcome_kind(ry));
            if (rd == "Z" && viaRD) return r_scaled_z(e, outcome_kind(ry));
            if (rd == "ZD" && viaRD) {
                if (ry == "Z") return r_1Z_2ZD(e);
                if (ry == "D") return r_1D_2ZD(e);
                if (ry == "Y") return r_1Y_2ZD(e);
            }
            if (rd == "ZU" && viaRD) {
                if (ry == "Z") return r_1Z_2ZU(e);
                if (ry == "U") return r_1U_2ZU(e);
                if (ry == "D") return r_1D_2ZU(e);
                if (ry == "Y") return r_1Y_2ZU(e);
            }
            break;
        }
        case Regime::Complete: break;
    }
    throw Error(ErrorKind::MechanismNotIdentifiable, "no recipe for mechanism " + id);
}

template <class T> T mean(const Vec<T>& law, const Vec<T>& ys) {
    T m(0);
    for (std::size_t y = 0; y < ys.size(); ++y) m += ys[y] * law[y];
    return m;
}

template <class T> JointLaw<T> assemble_joint(const Engine<T>& e, const std::array<T, 3>& pi, const Vec<T>& lawA,
                                              const std::array<Vec<T>, 2>& c, const Vec<T>& lawN) {
    JointLaw<T> out;
    const T pz[2] = {T(1) - e.o.pZ, e.o.pZ};
    for (int z = 0; z < 2; ++z)
        for (auto u : kTypes) {
            int d = treatment(u, z);
            const Vec<T>& law = u == ComplianceType::AlwaysTaker ? lawA : u == ComplianceType::NeverTaker ? lawN : c[d];
            T share = pi[static_cast<int>(u)];
            for (std::size_t y = 0; y < e.ny; ++y)
                out.push_back({z, static_cast<int>(u), d, static_cast<int>(y), share == 0 ? T(0) : T(pz[z] * share * law[y])});
        }
    return out;
}

template <class T>
IdentificationResult<T> finish(Engine<T>& e, const CatalogEntry& entry, Recovered<T> r) {
    IdentificationResult<T> res;
    res.mechanism = entry.spec.id;
    const auto& ys = e.o.ySupport;
    std::string jointFailure = r.jointFailure;
    if (r.q) {
        ArmTable<T> q = *r.q;
        for (int z = 0; z < 2; ++z) {
            T s(0);
            for (int d = 0; d < 2; ++d) {
                q[z][d] = e.nonneg("reconstructed P(D=" + std::to_string(d) + ", Y | " + zs(z) + ")", q[z][d]);
                s += sum(q[z][d]);
            }
            if constexpr (Num<T>::exact) {
                if (s != 1) throw Error(ErrorKind::InconsistentObservables, "reconstructed arm " + zs(z) + " sums to " + format(s));
            } else {
                if (!is_positive(s, e.tol.prob)) throw Error(ErrorKind::InconsistentObservables, "reconstructed arm " + zs(z) + " is empty");
                if (s != 1) {
                    e.note("renormalized sum at " + zs(z), s);
                    for (int d = 0; d < 2; ++d) q[z][d] = scaled(q[z][d], T(T(1) / s));
                }
            }
        }
        res.cace = wald_from_table(q, ys, e.tol.prob);
        T pn = sum(q[1][0]), pa = sum(q[0][1]);
        T pc = sum(q[1][1]) - pa;  // = P(D=1|Z=1) - P(D=1|Z=0)
        std::array<Vec<T>, 2> c;
        c[0] = scaled(e.strip("reconstructed compliers at D=0", q[0][0], q[1][0], T(1)), T(T(1) / pc));
        c[1] = scaled(e.strip("reconstructed compliers at D=1", q[1][1], q[0][1], T(1)), T(T(1) / pc));
        res.complierMeans = std::array<T, 2>{mean(c[0], ys), mean(c[1], ys)};
        e.note("P(U=n)", pn);
        e.note("P(U=a)", pa);
        e.note("P(U=c)", pc);
        if (entry.spec.jointRecoverable != JointVerdict::No) {
            Vec<T> ln = is_zero(pn, e.tol.prob) ? Vec<T>(e.ny, T(0)) : scaled(q[1][0], T(T(1) / pn));
            Vec<T> la = is_zero(pa, e.tol.prob) ? Vec<T>(e.ny, T(0)) : scaled(q[0][1], T(T(1) / pa));
            res.joint = assemble_joint(e, {pa, pc, pn}, la, c, ln);
        }
    } else if (r.meansUnidentified) {
        res.cace = T(0);
        jointFailure = "complier outcome laws are equal; only the CACE (= 0) is identified";
    } else {
        const auto& c = *r.complier;
        res.complierMeans = std::array<T, 2>{mean(c[0], ys), mean(c[1], ys)};
        res.cace = (*res.complierMeans)[1] - (*res.complierMeans)[0];
        if (r.shares) {
            const auto& pi = *r.shares;
            e.note("P(U=a)", pi[0]);
            e.note("P(U=c)", pi[1]);
            e.note("P(U=n)", pi[2]);
        }
        if (jointFailure.empty() && r.shares && r.lawA && r.lawN && entry.spec.jointRecoverable != JointVerdict::No) {
            const auto& pi = *r.shares;
            if (is_negative(pi[0], e.tol.prob) || is_negative(pi[2], e.tol.prob) || !is_positive(pi[1], e.tol.prob))
                jointFailure = "recovered compliance shares are not a distribution";
            else
                res.joint = assemble_joint(e, pi, *r.lawA, c, *r.lawN);
        } else if (jointFailure.empty()) {
            jointFailure = "compliance shares are not identified under this mechanism";
        }
    }
    if (entry.spec.jointRecoverable == JointVerdict::No) {
        res.joint.reset();
        jointFailure = "joint not identified";
    }
    if (entry.spec.id == "2UY" && !e.o.oneSided) {
        res.joint.reset();
        jointFailure = "joint not identified with two-sided noncompliance";
    }
    res.jointStatus = res.joint ? std::string("recovered") : jointFailure;
    res.nuisance = std::move(e.nuisance);
    res.diagnostics = std::move(e.diagnostics);
    res.positivity = std::move(e.positivity);
    return res;
}

std::string refusal_reason(const CatalogEntry& e) {
    std::string s = "mechanism " + e.spec.id + " is not identifiable";
    if (!e.fixtureId.empty()) s += " (" + e.fixtureId + ")";
    return s;
}

// Preflight shared by identify and check_conditions. Returns the embedded observable.
template <class T>
ObservableDistribution<T> preflight(const CatalogEntry& entry, const ObservableDistribution<T>& obs, const Tolerances& tol) {
    auto o = embed(obs, entry.spec.regime);
    auto problems = check_observable(o, tol);
    if (!problems.empty()) {
        std::string msg;
        for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
        throw Error(ErrorKind::InconsistentObservables, msg);
    }
    return o;
}

template <class T> std::string support_problem(const CatalogEntry& entry, const ObservableDistribution<T>& o) {
    if (entry.spec.binaryYRequired && o.ny() != 2) return "mechanism " + entry.spec.id + " requires binary Y";
    int lim = max_y_support(entry, o.oneSided);
    if (lim && static_cast<int>(o.ny()) > lim)
        return "mechanism " + entry.spec.id + " allows at most " + std::to_string(lim) + " outcome values here";
    return {};
}

}  // namespace

template <class T> T wald_cace(const ObservableDistribution<T>& obs, const Tolerances& tol) {
    auto c = obs.regime == Regime::Complete ? obs : to_complete(obs, tol.prob);
    ArmTable<T> q;
    for (int z = 0; z < 2; ++z) q[z] = c.arm[z].full;
    return wald_from_table(q, c.ySupport, tol.prob);
}

template <class T>
std::vector<T> strip_stratum(const std::vector<T>& arm, const std::vector<T>& cp, const std::vector<T>& adj, const Tolerances& tol) {
    if (arm.size() != cp.size() || arm.size() != adj.size())
        throw Error(ErrorKind::InconsistentObservables, "strip_stratum: length mismatch");
    std::vector<T> out(arm.size());
    for (std::size_t i = 0; i < arm.size(); ++i) {
        if (adj[i] < 0) throw Error(ErrorKind::InconsistentObservables, "strip_stratum: adjustment must be positive");
        out[i] = arm[i] - adj[i] * cp[i];
        if (is_negative(out[i], tol.prob))
            throw Error(ErrorKind::NegativeStratumMass, "stripped cell " + std::to_string(i) + " = " + format(out[i]));
        out[i] = clamp_nonneg(out[i]);
    }
    return out;
}

template <class T>
std::vector<T> strip_stratum(const std::vector<T>& arm, const std::vector<T>& cp, const T& adj, const Tolerances& tol) {
    return strip_stratum(arm, cp, std::vector<T>(arm.size(), adj), tol);
}

template <class T> BinaryRatioSolution<T> solve_binary_ratio(const T& r1, const T& r0, const Tolerances& tol) {
    if (!(r1 > 0) || !(r0 > 0)) throw Error(ErrorKind::InconsistentObservables, "complier ratios must be positive");
    BinaryRatioSolution<T> s;
    bool equal;
    if constexpr (Num<T>::exact) equal = r1 == r0;
    else equal = std::fabs(r1 - r0) < tol.det * std::max(1.0, std::max(std::fabs(r1), std::fabs(r0)));
    if (equal) {
        if (!nearly_equal(r1, T(1), Num<T>::exact ? 0.0 : std::sqrt(tol.det)))
            throw Error(ErrorKind::InconsistentObservables, "equal complier ratios must both be 1, got " + format(r1));
        return s;
    }
    T p1 = (T(1) - r0) / (r1 - r0);
    T p0 = r1 * p1;
    for (T* p : {&p1, &p0}) {
        if (is_negative(*p, tol.prob) || is_negative(T(T(1) - *p), tol.prob))
            throw Error(ErrorKind::InconsistentObservables, "complier probability " + format(*p) + " outside [0,1]");
        *p = clamp_nonneg(*p);
        if (*p > 1) *p = T(1);
    }
    s.meansIdentified = true;
    s.p1 = p1;
    s.p0 = p0;
    return s;
}

template <class T>
IdentificationResult<T> identify(std::string_view mech, const ObservableDistribution<T>& obs, const Tolerances& tol) {
    const auto& entry = lookup(mech);
    if (!entry.spec.identifiable) throw Error(ErrorKind::MechanismNotIdentifiable, refusal_reason(entry));
    auto o = preflight(entry, obs, tol);
    if (!sidedness_allows(entry.spec.sidednessRequired, o.oneSided))
        throw Error(ErrorKind::SidednessMismatch, "mechanism " + entry.spec.id + " requires " +
                                                      (entry.spec.sidednessRequired == Sidedness::OneSidedOnly ? "one-sided"
                                                                                                               : "two-sided") +
                                                      " noncompliance");
    if (auto p = support_problem(entry, o); !p.empty()) throw Error(ErrorKind::MechanismNotIdentifiable, p);
    Engine<T> e(o, tol, false);
    return finish(e, entry, run_recipe(e, entry));
}

template <class T>
JointRecovery<T> recover_joint(std::string_view mech, const ObservableDistribution<T>& obs, const Tolerances& tol) {
    auto res = identify(mech, obs, tol);
    return {res.joint, res.jointStatus};
}

template <class T>
ConditionReport check_conditions(std::string_view mech, const ObservableDistribution<T>& obs, const Tolerances& tol) {
    const auto& entry = lookup(mech);
    ConditionReport rep;
    rep.mechanism = entry.spec.id;
    rep.identifiable = entry.spec.identifiable;
    auto o = embed(obs, entry.spec.regime);
    rep.sidednessOk = sidedness_allows(entry.spec.sidednessRequired, o.oneSided);
    auto sp = support_problem(entry, o);
    rep.supportOk = sp.empty();
    if (!rep.identifiable) {
        rep.stoppedAt = refusal_reason(entry);
        return rep;
    }
    if (!rep.supportOk) {
        rep.stoppedAt = sp;
        return rep;
    }
    auto problems = check_observable(o, tol);
    if (!problems.empty()) {
        rep.stoppedAt = problems.front();
        return rep;
    }
    Engine<T> e(o, tol, true);
    try {
        run_recipe(e, entry);
    } catch (const Error& err) {
        rep.stoppedAt = err.what();
    } catch (const std::exception& err) {
        rep.stoppedAt = std::string("evaluation stopped: ") + err.what();
    }
    rep.positivity = std::move(e.positivity);
    rep.dependence = std::move(e.diagnostics);
    return rep;
}

#define IVMNAR_INSTANTIATE(T)                                                                                         \
    template T wald_cace(const ObservableDistribution<T>&, const Tolerances&);                                        \
    template std::vector<T> strip_stratum(const std::vector<T>&, const std::vector<T>&, const T&, const Tolerances&); \
    template std::vector<T> strip_stratum(const std::vector<T>&, const std::vector<T>&, const std::vector<T>&,        \
                                          const Tolerances&);                                                         \
    template BinaryRatioSolution<T> solve_binary_ratio(const T&, const T&, const Tolerances&);                        \
    template IdentificationResult<T> identify(std::string_view, const ObservableDistribution<T>&, const Tolerances&); \
    template JointRecovery<T> recover_joint(std::string_view, const ObservableDistribution<T>&, const Tolerances&);   \
    template ConditionReport check_conditions(std::string_view, const ObservableDistribution<T>&, const Tolerances&);

IVMNAR_INSTANTIATE(double)
IVMNAR_INSTANTIATE(Rational)

}  // namespace ivmnar
