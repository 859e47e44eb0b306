#include "ivmnar/forward.hpp"

#include "ivmnar/catalog.hpp"
#include "ivmnar/errors.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace ivmnar {

namespace {

// P(u, d, y | z) for every cell with positive mass
template <class T> struct Latent {
    int z, u, d, y;
    T mass;
};

template <class T> std::vector<Latent<T>> latent_cells(const StructuralParams<T>& p) {
    std::vector<Latent<T>> out;
    for (int z = 0; z < 2; ++z) {
        if (p.armLaw) {
            for (int d = 0; d < 2; ++d)
                for (std::size_t y = 0; y < p.ny(); ++y) {
                    const T& m = (*p.armLaw)[z][d][y];
                    if (m != 0) out.push_back({z, -1, d, static_cast<int>(y), m});
                }
            continue;
        }
        for (auto u : kTypes) {
            const T& pu = p.pi(u);
            if (pu == 0) continue;
            int d = treatment(u, z);
            const auto& law = p.law(stratum_of(u, d));
            for (std::size_t y = 0; y < law.size(); ++y) {
                T m = pu * law[y];
                if (m != 0) out.push_back({z, static_cast<int>(u), d, static_cast<int>(y), m});
            }
        }
    }
    return out;
}

bool has_rd(Regime r) { return r == Regime::TreatmentOnly || r == Regime::Both; }
bool has_ry(Regime r) { return r == Regime::OutcomeOnly || r == Regime::Both; }

template <class T> void check_unit(std::set<std::string>& v, const T& x, const std::string& what, double tol) {
    if (is_negative(x, tol) || is_negative(T(1) - x, tol)) v.insert(what + " outside [0,1]");
}

}  // namespace

template <class T>
std::vector<std::string> validate(const StructuralParams<T>& p, const MechanismSpec& mech, const Tolerances& tol,
                                  ValidationScope scope) {
    std::set<std::string> v;
    const bool full = scope == ValidationScope::Full;
    if (!(p.pZ > 0 && p.pZ < 1)) v.insert("pZ must lie in (0,1)");
    if (p.ny() < 2) v.insert("ySupport needs at least two values");
    for (std::size_t i = 0; i < p.ny(); ++i)
        for (std::size_t j = i + 1; j < p.ny(); ++j)
            if (p.ySupport[i] == p.ySupport[j]) v.insert("ySupport values must be distinct");
    if (full && mech.binaryYRequired && p.ny() != 2) v.insert("mechanism " + mech.id + " requires a binary outcome");
    if (full && !sidedness_allows(mech.sidednessRequired, p.oneSided))
        v.insert(std::string("mechanism ") + mech.id + " requires " +
                 (mech.sidednessRequired == Sidedness::OneSidedOnly ? "one-sided" : "two-sided") + " noncompliance");
    if (full && mech.identifiable) {
        for (const auto& e : catalog())
            if (e.spec.id == mech.id) {
                int lim = max_y_support(e, p.oneSided);
                if (lim && static_cast<int>(p.ny()) > lim)
                    v.insert("mechanism " + mech.id + " allows at most " + std::to_string(lim) + " outcome values here");
            }
    }

    if (p.armLaw) {
        if ((has_rd(mech.regime) && mech.rdParents.has(Var::U)) || (has_ry(mech.regime) && mech.ryParents.has(Var::U)))
            v.insert("response model depends on U but the law is given as P(D,Y|Z)");
        for (int z = 0; z < 2; ++z) {
            T s(0);
            for (int d = 0; d < 2; ++d) {
                if ((*p.armLaw)[z][d].size() != p.ny()) v.insert("arm law has the wrong length");
                for (const auto& x : (*p.armLaw)[z][d]) {
                    check_unit(v, x, "arm law entry", tol.prob);
                    s += x;
                }
            }
            if (!nearly_equal(s, T(1), tol.prob)) v.insert("arm law for z=" + std::to_string(z) + " does not sum to 1");
        }
        if (p.oneSided)
            for (const auto& x : (*p.armLaw)[0][1])
                if (!is_zero(x, tol.prob)) v.insert("one-sided requires P(D=1 | Z=0) = 0");
    } else {
        T s(0);
        for (auto u : kTypes) {
            check_unit(v, p.pi(u), std::string("piU[") + type_label(u) + "]", tol.prob);
            s += p.pi(u);
        }
        if (!nearly_equal(s, T(1), tol.prob)) v.insert("piU does not sum to 1");
        if (!is_positive(p.pi(ComplianceType::Complier), tol.prob)) v.insert("piU[c] must be positive");
        if (p.oneSided && !is_zero(p.pi(ComplianceType::AlwaysTaker), tol.prob))
            v.insert("one-sided requires no always-takers");
        for (auto st : kStrata) {
            if (st == Stratum::A1 && p.pi(ComplianceType::AlwaysTaker) == 0 && p.law(st).empty()) continue;
            if (st == Stratum::N0 && p.pi(ComplianceType::NeverTaker) == 0 && p.law(st).empty()) continue;
            const auto& law = p.law(st);
            if (law.size() != p.ny()) {
                v.insert(std::string("outcome law ") + to_string(st) + " has the wrong length");
                continue;
            }
            T t(0);
            for (const auto& x : law) {
                check_unit(v, x, std::string("outcome law ") + to_string(st), tol.prob);
                t += x;
            }
            if (!nearly_equal(t, T(1), tol.prob)) v.insert(std::string("outcome law ") + to_string(st) + " does not sum to 1");
        }
    }
    if (!v.empty()) return {v.begin(), v.end()};

    if (has_rd(mech.regime) && !(p.responseD.parents == mech.rdParents))
        v.insert("responseD parents do not match mechanism " + mech.id);
    if (has_ry(mech.regime) && !(p.responseY.parents == mech.ryParents))
        v.insert("responseY parents do not match mechanism " + mech.id);
    if (!v.empty()) return {v.begin(), v.end()};

    for (const auto& c : latent_cells(p)) {
        std::int8_t key[kNumVars] = {static_cast<std::int8_t>(c.z), static_cast<std::int8_t>(c.u),
                                     static_cast<std::int8_t>(c.d), static_cast<std::int8_t>(c.y), 1};
        std::vector<int> rds{1};
        if (has_rd(mech.regime)) {
            const T* pd = p.responseD.find(key);
            if (!pd) {
                v.insert("responseD missing cell " + cell_key_string(p.responseD.key_for(key)));
                continue;
            }
            check_unit(v, *pd, "responseD " + cell_key_string(p.responseD.key_for(key)), tol.prob);
            rds.clear();
            if (*pd != 0) rds.push_back(1);
            if (*pd != 1) rds.push_back(0);
            for (const auto& pc : mech.positivityCells)
                if (full && pc.which == Indicator::RD && pc.cell.matches(key) && !is_positive(*pd, tol.prob))
                    v.insert("positivity at (" + cell_key_string(p.responseD.key_for(key)) + "): " + pc.label);
        }
        if (!has_ry(mech.regime)) continue;
        for (int rd : rds) {
            key[4] = static_cast<std::int8_t>(rd);
            const T* py = p.responseY.find(key);
            if (!py) {
                v.insert("responseY missing cell " + cell_key_string(p.responseY.key_for(key)));
                continue;
            }
            check_unit(v, *py, "responseY " + cell_key_string(p.responseY.key_for(key)), tol.prob);
            for (const auto& pc : mech.positivityCells)
                if (full && pc.which == Indicator::RY && pc.cell.matches(key) && !is_positive(*py, tol.prob))
                    v.insert("positivity at (" + cell_key_string(p.responseY.key_for(key)) + "): " + pc.label);
        }
    }
    return {v.begin(), v.end()};
}

template <class T> T wald_from_table(const ArmTable<T>& q, const std::vector<T>& ys, double tolProb) {
    T ey[2], pd[2];
    for (int z = 0; z < 2; ++z) {
        ey[z] = T(0);
        pd[z] = T(0);
        for (int d = 0; d < 2; ++d)
            for (std::size_t y = 0; y < ys.size(); ++y) {
                ey[z] += ys[y] * q[z][d][y];
                if (d == 1) pd[z] += q[z][d][y];
            }
    }
    T den = pd[1] - pd[0];
    if (is_zero(den, tolProb)) throw Error(ErrorKind::ZeroFirstStage, "P(D=1|Z=1) = P(D=1|Z=0)");
    return (ey[1] - ey[0]) / den;
}

template <class T> ArmTable<T> arm_table(const StructuralParams<T>& p) {
    if (p.armLaw) return *p.armLaw;
    ArmTable<T> q;
    for (auto& a : q)
        for (auto& v : a) v.assign(p.ny(), T(0));
    for (const auto& c : latent_cells(p)) q[c.z][c.d][c.y] += c.mass;
    return q;
}

template <class T> T true_cace(const StructuralParams<T>& p) {
    if (p.armLaw) return wald_from_table(*p.armLaw, p.ySupport);
    T m(0);
    const auto& c1 = p.law(Stratum::C1);
    const auto& c0 = p.law(Stratum::C0);
    for (std::size_t y = 0; y < p.ny(); ++y) m += p.ySupport[y] * (c1[y] - c0[y]);
    return m;
}

template <class T> JointLaw<T> structural_joint(const StructuralParams<T>& p) {
    JointLaw<T> out;
    T pz[2] = {T(1) - p.pZ, p.pZ};
    if (p.armLaw) {
        // strata implied by monotonicity; entries may be negative if the table is not IV-consistent
        const auto& q = *p.armLaw;
        T pin(0), pia(0);
        for (std::size_t y = 0; y < p.ny(); ++y) {
            pin += q[1][0][y];
            pia += q[0][1][y];
        }
        for (int z = 0; z < 2; ++z)
            for (auto u : kTypes) {
                int d = treatment(u, z);
                for (std::size_t y = 0; y < p.ny(); ++y) {
                    T m;
                    if (u == ComplianceType::NeverTaker) m = q[1][0][y];
                    else if (u == ComplianceType::AlwaysTaker) m = q[0][1][y];
                    else m = d ? T(q[1][1][y] - q[0][1][y]) : T(q[0][0][y] - q[1][0][y]);
                    out.push_back({z, static_cast<int>(u), d, static_cast<int>(y), pz[z] * m});
                }
            }
        return out;
    }
    for (int z = 0; z < 2; ++z)
        for (auto u : kTypes) {
            int d = treatment(u, z);
            const auto& law = p.law(stratum_of(u, d));
            for (std::size_t y = 0; y < p.ny(); ++y) {
                T m = p.pi(u) == 0 ? T(0) : T(pz[z] * p.pi(u) * law[y]);
                out.push_back({z, static_cast<int>(u), d, static_cast<int>(y), m});
            }
        }
    return out;
}

template <class T> std::vector<Atom<T>> joint_atoms(const StructuralParams<T>& p, const MechanismSpec& mech) {
    std::vector<Atom<T>> out;
    T pz[2] = {T(1) - p.pZ, p.pZ};
    for (const auto& c : latent_cells(p)) {
        std::int8_t key[kNumVars] = {static_cast<std::int8_t>(c.z), static_cast<std::int8_t>(c.u),
                                     static_cast<std::int8_t>(c.d), static_cast<std::int8_t>(c.y), 1};
        T base = pz[c.z] * c.mass;
        T pd(1);
        if (has_rd(mech.regime)) {
            const T* f = p.responseD.find(key);
            if (!f) throw Error(ErrorKind::ValidationFailed, "responseD missing cell " + cell_key_string(p.responseD.key_for(key)));
            pd = *f;
        }
        for (int rd = 1; rd >= 0; --rd) {
            T wrd = rd ? pd : T(1) - pd;
            if (wrd == 0) continue;
            key[4] = static_cast<std::int8_t>(rd);
            T py(1);
            if (has_ry(mech.regime)) {
                const T* f = p.responseY.find(key);
                if (!f) throw Error(ErrorKind::ValidationFailed, "responseY missing cell " + cell_key_string(p.responseY.key_for(key)));
                py = *f;
            }
            for (int ry = 1; ry >= 0; --ry) {
                T wry = ry ? py : T(1) - py;
                if (wry == 0) continue;
                out.push_back({c.z, c.u, c.d, c.y, rd, ry, base * wrd * wry});
            }
        }
    }
    return out;
}

template <class T> ObservableDistribution<T> forward_observable(const StructuralParams<T>& p, const MechanismSpec& mech) {
    auto v = validate(p, mech, {}, ValidationScope::Generative);
    if (!v.empty()) {
        std::string msg;
        for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
        throw Error(ErrorKind::ValidationFailed, msg);
    }
    auto obs = ObservableDistribution<T>::zeros(mech.regime, p.pZ, p.ySupport, p.oneSided);
    T pz[2] = {T(1) - p.pZ, p.pZ};
    for (const auto& a : joint_atoms(p, mech)) {
        auto& arm = obs.arm[a.z];
        T m = a.prob / pz[a.z];
        if (a.rd && a.ry) arm.full[a.d][a.y] += m;
        else if (a.ry) arm.dMissing[a.y] += m;
        else if (a.rd) arm.yMissing[a.d] += m;
        else arm.bothMissing += m;
    }
    return obs;
}

template <class T> ObservableDistribution<T> complete_observable(const StructuralParams<T>& p) {
    auto obs = ObservableDistribution<T>::zeros(Regime::Complete, p.pZ, p.ySupport, p.oneSided);
    auto q = arm_table(p);
    for (int z = 0; z < 2; ++z)
        for (int d = 0; d < 2; ++d) obs.arm[z].full[d] = q[z][d];
    return obs;
}

template <class T> ObservableDistribution<T> to_complete(const ObservableDistribution<T>& o, double tolProb) {
    auto out = ObservableDistribution<T>::zeros(Regime::Complete, o.pZ, o.ySupport, o.oneSided);
    for (int z = 0; z < 2; ++z) {
        const auto& a = o.arm[z];
        T miss = a.yMissing[0] + a.yMissing[1] + a.bothMissing;
        for (const auto& x : a.dMissing) miss += x;
        if (!is_zero(miss, tolProb)) throw Error(ErrorKind::RegimeMismatch, "distribution has missing-data mass");
        out.arm[z].full = a.full;
    }
    return out;
}

Dataset sample_dataset(const StructuralParams<double>& p, const MechanismSpec& mech, std::size_t n, std::uint64_t seed) {
    auto v = validate(p, mech, {}, ValidationScope::Generative);
    if (!v.empty()) throw Error(ErrorKind::ValidationFailed, v.front());
    auto atoms = joint_atoms(p, mech);
    std::vector<double> cum;
    cum.reserve(atoms.size());
    double acc = 0;
    for (const auto& a : atoms) cum.push_back(acc += a.prob);
    Dataset ds;
    ds.regime = mech.regime;
    ds.records.reserve(n);
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < n; ++i) {
        double u = static_cast<double>(gen() >> 11) * 0x1.0p-53 * acc;
        auto idx = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        const auto& a = atoms[std::min(idx, atoms.size() - 1)];
        Record r;
        r.z = a.z;
        if (a.rd) r.d = a.d;
        if (a.ry) r.y = p.ySupport[a.y];
        ds.records.push_back(r);
    }
    return ds;
}

#define IVMNAR_INSTANTIATE(T)                                                                          \
    template std::vector<std::string> validate(const StructuralParams<T>&, const MechanismSpec&, const Tolerances&, ValidationScope); \
    template T true_cace(const StructuralParams<T>&);                                                  \
    template T wald_from_table(const ArmTable<T>&, const std::vector<T>&, double);                     \
    template ArmTable<T> arm_table(const StructuralParams<T>&);                                        \
    template JointLaw<T> structural_joint(const StructuralParams<T>&);                                 \
    template std::vector<Atom<T>> joint_atoms(const StructuralParams<T>&, const MechanismSpec&);       \
    template ObservableDistribution<T> forward_observable(const StructuralParams<T>&, const MechanismSpec&); \
    template ObservableDistribution<T> complete_observable(const StructuralParams<T>&);                \
    template ObservableDistribution<T> to_complete(const ObservableDistribution<T>&, double);

IVMNAR_INSTANTIATE(double)
IVMNAR_INSTANTIATE(Rational)

}  // namespace ivmnar
