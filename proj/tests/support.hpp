#pragma once
// Shared test helpers: random parameter draws and a brute-force forward oracle that
// does not share code with forward_observable.

#include "ivmnar/catalog.hpp"
#include "ivmnar/forward.hpp"
#include "ivmnar/identify.hpp"
#include "ivmnar/model.hpp"

#include <random>
#include <string>
#include <vector>

namespace ivmnar::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

// k/den with k uniform in [lo, hi]
inline Rational frac(Rng& g, int lo, int hi, int den) { return Rational(uniform_int(g, lo, hi), den); }

inline std::vector<Rational> random_law(Rng& g, std::size_t ny) {
    std::vector<Rational> w(ny);
    Rational s(0);
    for (auto& x : w) s += x = Rational(uniform_int(g, 1, 12));
    for (auto& x : w) x /= s;
    return w;
}

inline bool has_rd(Regime r) { return r == Regime::TreatmentOnly || r == Regime::Both; }
inline bool has_ry(Regime r) { return r == Regime::OutcomeOnly || r == Regime::Both; }

inline std::vector<CellKey> all_keys(VarSet parents, std::size_t ny) {
    std::vector<CellKey> out(1);
    out[0].fill(-1);
    const int range[kNumVars] = {2, 3, 2, static_cast<int>(ny), 2};
    for (int i = 0; i < kNumVars; ++i) {
        if (!parents.has(static_cast<Var>(i))) continue;
        std::vector<CellKey> next;
        for (const auto& k : out)
            for (int v = 0; v < range[i]; ++v) {
                auto n = k;
                n[i] = static_cast<std::int8_t>(v);
                next.push_back(n);
            }
        out = std::move(next);
    }
    return out;
}

struct DrawOptions {
    bool oneSided = false;
    std::size_t ny = 2;
    int respLo = 5, respHi = 19;  // response probabilities k/20
    bool responsesOne = false;    // every response probability = 1
};

// Structural params for `mech`, exact rationals.
inline StructuralParams<Rational> random_params(const MechanismSpec& mech, Rng& g, const DrawOptions& o) {
    StructuralParams<Rational> p;
    p.pZ = frac(g, 4, 12, 16);
    p.oneSided = o.oneSided;
    p.ySupport.clear();
    for (std::size_t y = 0; y < o.ny; ++y) p.ySupport.push_back(Rational(static_cast<int>(y)));
    if (o.oneSided) {
        Rational c = frac(g, 6, 16, 20);
        p.piU = {Rational(0), c, Rational(1) - c};
    } else {
        Rational a(uniform_int(g, 2, 8)), c(uniform_int(g, 4, 10)), n(uniform_int(g, 2, 8));
        Rational s = a + c + n;
        p.piU = {a / s, c / s, n / s};
        p.outcomeLaw[static_cast<int>(Stratum::A1)] = random_law(g, o.ny);
    }
    for (auto s : {Stratum::N0, Stratum::C0, Stratum::C1}) p.outcomeLaw[static_cast<int>(s)] = random_law(g, o.ny);
    auto fill = [&](ResponseTable<Rational>& t, VarSet parents) {
        t.parents = parents;
        for (const auto& k : all_keys(parents, o.ny)) t.prob[k] = o.responsesOne ? Rational(1) : frac(g, o.respLo, o.respHi, 20);
    };
    if (has_rd(mech.regime)) fill(p.responseD, mech.rdParents);
    if (has_ry(mech.regime)) fill(p.responseY, mech.ryParents);
    return p;
}

// Brute force: sum over every (z, u, d, y, r^D, r^Y) with D determined by (u, z).
template <class T> ObservableDistribution<T> oracle_forward(const StructuralParams<T>& p, const MechanismSpec& mech) {
    auto o = ObservableDistribution<T>::zeros(mech.regime, p.pZ, p.ySupport, p.oneSided);
    const bool rdOn = has_rd(mech.regime), ryOn = has_ry(mech.regime);
    auto lookup_prob = [](const ResponseTable<T>& t, int z, int u, int d, int y, int rd) -> T {
        CellKey k;
        const int v[kNumVars] = {z, u, d, y, rd};
        for (int i = 0; i < kNumVars; ++i) k[i] = t.parents.has(static_cast<Var>(i)) ? static_cast<std::int8_t>(v[i]) : std::int8_t(-1);
        return t.prob.at(k);
    };
    for (int z = 0; z < 2; ++z)
        for (int u = 0; u < 3; ++u) {
            T pu = p.piU[u];
            if (pu == 0) continue;
            const auto type = static_cast<ComplianceType>(u);
            const int d = treatment(type, z);
            const auto& law = p.outcomeLaw[static_cast<int>(stratum_of(type, d))];
            for (std::size_t y = 0; y < p.ny(); ++y)
                for (int rd = 0; rd < 2; ++rd)
                    for (int ry = 0; ry < 2; ++ry) {
                        T w = pu * law[y];
                        if (rdOn) {
                            T q = lookup_prob(p.responseD, z, u, d, static_cast<int>(y), 0);
                            w *= rd ? q : T(1) - q;
                        } else if (!rd) {
                            continue;
                        }
                        if (ryOn) {
                            T q = lookup_prob(p.responseY, z, u, d, static_cast<int>(y), rd);
                            w *= ry ? q : T(1) - q;
                        } else if (!ry) {
                            continue;
                        }
                        auto& a = o.arm[z];
                        if (rd && ry) a.full[d][y] += w;
                        else if (ry) a.dMissing[y] += w;
                        else if (rd) a.yMissing[d] += w;
                        else a.bothMissing += w;
                    }
        }
    return o;
}

template <class T> bool same_cells(const ObservableDistribution<T>& a, const ObservableDistribution<T>& b, double tol = 0) {
    auto x = a.named_cells(), y = b.named_cells();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].first != y[i].first) return false;
        if constexpr (Num<T>::exact) {
            if (x[i].second != y[i].second) return false;
        } else if (std::fabs(x[i].second - y[i].second) > tol) {
            return false;
        }
    }
    return true;
}

// Sidedness to draw for a mechanism: forced when it requires one, else alternate.
inline bool pick_one_sided(const MechanismSpec& m, Rng& g) {
    if (m.sidednessRequired == Sidedness::OneSidedOnly) return true;
    if (m.sidednessRequired == Sidedness::TwoSidedOnly) return false;
    return uniform_int(g, 0, 1) == 1;
}

inline std::size_t pick_ny(const CatalogEntry& e, bool oneSided, Rng& g) {
    if (e.spec.binaryYRequired) return 2;
    int lim = max_y_support(e, oneSided);
    int hi = lim ? std::min(lim, 3) : 3;
    return static_cast<std::size_t>(uniform_int(g, 2, hi));
}

// validate + check_conditions with every dependence magnitude >= floor
template <class T>
bool usable(const StructuralParams<Rational>& p, const MechanismSpec& m, const ObservableDistribution<T>& obs, double floor) {
    if (!validate(p, m).empty()) return false;
    auto rep = check_conditions(m.id, obs);
    if (!rep.all_pass()) return false;
    for (const auto& d : rep.dependence)
        if (d.magnitude < floor) return false;
    return true;
}

inline std::vector<const CatalogEntry*> identifiable_entries(bool includeMcar = false) {
    std::vector<const CatalogEntry*> out;
    for (const auto& e : catalog())
        if (e.spec.identifiable && (includeMcar || (e.spec.id != "MCAR-Y" && e.spec.id != "MCAR-D"))) out.push_back(&e);
    return out;
}

}  // namespace ivmnar::testing
