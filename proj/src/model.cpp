#include "ivmnar/model.hpp"

#include "ivmnar/errors.hpp"

namespace ivmnar {

std::string cell_key_string(const CellKey& k) {
    CellPattern p;
    for (int i = 0; i < kNumVars; ++i) p.v[i] = k[i];
    return p.to_string();
}

CellKey parse_cell_key(std::string_view s) {
    CellKey k;
    k.fill(-1);
    while (!s.empty()) {
        auto comma = s.find(',');
        auto part = s.substr(0, comma);
        s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
        auto eq = part.find('=');
        if (eq == std::string_view::npos) throw Error(ErrorKind::ParseError, "bad cell key '" + std::string(part) + "'");
        auto name = part.substr(0, eq), val = part.substr(eq + 1);
        int idx;
        if (name == "z") idx = 0;
        else if (name == "u") idx = 1;
        else if (name == "d") idx = 2;
        else if (name == "y") idx = 3;
        else if (name == "rd") idx = 4;
        else throw Error(ErrorKind::ParseError, "bad cell variable '" + std::string(name) + "'");
        if (val.size() != 1) throw Error(ErrorKind::ParseError, "bad cell value in '" + std::string(part) + "'");
        if (idx == 1) k[idx] = static_cast<std::int8_t>(parse_type(val[0]));
        else if (val[0] >= '0' && val[0] <= '9') k[idx] = static_cast<std::int8_t>(val[0] - '0');
        else throw Error(ErrorKind::ParseError, "bad cell value in '" + std::string(part) + "'");
    }
    return k;
}

const char* to_string(Stratum s) {
    switch (s) {
        case Stratum::A1: return "a1";
        case Stratum::N0: return "n0";
        case Stratum::C0: return "c0";
        case Stratum::C1: return "c1";
    }
    return "?";
}

ComplianceType stratum_type(Stratum s) {
    switch (s) {
        case Stratum::A1: return ComplianceType::AlwaysTaker;
        case Stratum::N0: return ComplianceType::NeverTaker;
        default: return ComplianceType::Complier;
    }
}

int stratum_d(Stratum s) { return (s == Stratum::A1 || s == Stratum::C1) ? 1 : 0; }

Stratum stratum_of(ComplianceType u, int d) {
    switch (u) {
        case ComplianceType::AlwaysTaker: return Stratum::A1;
        case ComplianceType::NeverTaker: return Stratum::N0;
        case ComplianceType::Complier: return d ? Stratum::C1 : Stratum::C0;
    }
    return Stratum::C0;
}

template <class T>
ObservableDistribution<T> ObservableDistribution<T>::zeros(Regime r, const T& pZ, std::vector<T> ys, bool oneSided) {
    ObservableDistribution o;
    o.regime = r;
    o.pZ = pZ;
    o.ySupport = std::move(ys);
    o.oneSided = oneSided;
    for (auto& a : o.arm) {
        a.full[0].assign(o.ny(), T(0));
        a.full[1].assign(o.ny(), T(0));
        a.dMissing.assign(o.ny(), T(0));
        a.yMissing = {T(0), T(0)};
        a.bothMissing = T(0);
    }
    return o;
}

template <class T> std::vector<std::pair<std::string, T>> ObservableDistribution<T>::named_cells() const {
    std::vector<std::pair<std::string, T>> out;
    for (int z = 0; z < 2; ++z) {
        const auto& a = arm[z];
        std::string zs = "|" + std::to_string(z);
        for (int d = 0; d < 2; ++d)
            for (std::size_t y = 0; y < ny(); ++y) {
                std::string base = std::to_string(d) + std::to_string(y);
                switch (regime) {
                    case Regime::Complete: out.emplace_back(base + zs, a.full[d][y]); break;
                    case Regime::Both: out.emplace_back(base + "11" + zs, a.full[d][y]); break;
                    default: out.emplace_back(base + "1" + zs, a.full[d][y]); break;
                }
            }
        if (regime == Regime::OutcomeOnly)
            for (int d = 0; d < 2; ++d) out.emplace_back(std::to_string(d) + "+0" + zs, a.yMissing[d]);
        if (regime == Regime::TreatmentOnly)
            for (std::size_t y = 0; y < ny(); ++y) out.emplace_back(std::to_string(y) + "+0" + zs, a.dMissing[y]);
        if (regime == Regime::Both) {
            for (std::size_t y = 0; y < ny(); ++y) out.emplace_back(std::to_string(y) + "+01" + zs, a.dMissing[y]);
            for (int d = 0; d < 2; ++d) out.emplace_back(std::to_string(d) + "1+0" + zs, a.yMissing[d]);
            out.emplace_back("+0+0" + zs, a.bothMissing);
        }
    }
    return out;
}

template <class T> T& ObservableDistribution<T>::cell(const std::string& name) {
    auto bar = name.find('|');
    if (bar == std::string::npos || bar + 2 != name.size() || (name[bar + 1] != '0' && name[bar + 1] != '1'))
        throw Error(ErrorKind::ParseError, "bad cell name '" + name + "'");
    auto& a = arm[name[bar + 1] - '0'];
    std::string body = name.substr(0, bar);
    auto digit = [&](char c, std::size_t limit) -> std::size_t {
        if (c < '0' || c > '9' || static_cast<std::size_t>(c - '0') >= limit)
            throw Error(ErrorKind::ParseError, "bad cell name '" + name + "'");
        return c - '0';
    };
    auto fail = [&]() -> T& { throw Error(ErrorKind::ParseError, "cell '" + name + "' not in regime " + to_string(regime)); };
    switch (regime) {
        case Regime::Complete:
            if (body.size() == 2) return a.full[digit(body[0], 2)][digit(body[1], ny())];
            return fail();
        case Regime::OutcomeOnly:
            if (body.size() == 3 && body[2] == '1') return a.full[digit(body[0], 2)][digit(body[1], ny())];
            if (body.size() == 3 && body.substr(1) == "+0") return a.yMissing[digit(body[0], 2)];
            return fail();
        case Regime::TreatmentOnly:
            if (body.size() == 3 && body[2] == '1') return a.full[digit(body[0], 2)][digit(body[1], ny())];
            if (body.size() == 3 && body.substr(1) == "+0") return a.dMissing[digit(body[0], ny())];
            return fail();
        case Regime::Both:
            if (body == "+0+0") return a.bothMissing;
            if (body.size() == 4 && body.substr(2) == "11") return a.full[digit(body[0], 2)][digit(body[1], ny())];
            if (body.size() == 4 && body.substr(1) == "+01") return a.dMissing[digit(body[0], ny())];
            if (body.size() == 4 && body.substr(1) == "1+0") return a.yMissing[digit(body[0], 2)];
            return fail();
    }
    return fail();
}

template <class T> const T& ObservableDistribution<T>::cell(const std::string& name) const {
    return const_cast<ObservableDistribution*>(this)->cell(name);
}

template <class T> T arm_total(const ObservableDistribution<T>& o, int z) {
    const auto& a = o.arm[z];
    T s(0);
    for (int d = 0; d < 2; ++d)
        for (const auto& x : a.full[d]) s += x;
    for (const auto& x : a.dMissing) s += x;
    s += a.yMissing[0] + a.yMissing[1] + a.bothMissing;
    return s;
}

template <class T> ObservableDistribution<T> embed(const ObservableDistribution<T>& o, Regime target) {
    if (o.regime == target) return o;
    auto has_d_missing = [](Regime r) { return r == Regime::TreatmentOnly || r == Regime::Both; };
    auto has_y_missing = [](Regime r) { return r == Regime::OutcomeOnly || r == Regime::Both; };
    if ((has_d_missing(o.regime) && !has_d_missing(target)) || (has_y_missing(o.regime) && !has_y_missing(target)))
        throw Error(ErrorKind::RegimeMismatch, std::string("cannot view ") + to_string(o.regime) + " data as " + to_string(target));
    ObservableDistribution<T> out = o;
    out.regime = target;
    return out;
}

template <class T> std::vector<std::string> check_observable(const ObservableDistribution<T>& o, const Tolerances& tol) {
    std::vector<std::string> out;
    if (!(o.pZ > 0 && o.pZ < 1)) out.push_back("pZ must lie in (0,1)");
    if (o.ny() < 2) out.push_back("ySupport needs at least two values");
    for (const auto& [name, v] : o.named_cells())
        if (is_negative(v, tol.prob) || is_negative(T(1) - v, tol.prob)) out.push_back("cell " + name + " outside [0,1]");
    for (int z = 0; z < 2; ++z) {
        T s = arm_total(o, z);
        if (!nearly_equal(s, T(1), tol.prob)) out.push_back("arm z=" + std::to_string(z) + " sums to " + format(s));
    }
    if (o.oneSided) {
        const auto& a = o.arm[0];
        T s = a.yMissing[1];
        for (const auto& x : a.full[1]) s += x;
        if (!is_zero(s, tol.prob)) out.push_back("declared one-sided but cells at (z=0,d=1) are nonzero");
    }
    return out;
}

template <class T> ObservableDistribution<double> to_float(const ObservableDistribution<T>& o) {
    ObservableDistribution<double> f;
    f.regime = o.regime;
    f.pZ = to_double(o.pZ);
    f.ySupport = to_doubles(o.ySupport);
    f.oneSided = o.oneSided;
    for (int z = 0; z < 2; ++z) {
        for (int d = 0; d < 2; ++d) f.arm[z].full[d] = to_doubles(o.arm[z].full[d]);
        f.arm[z].dMissing = to_doubles(o.arm[z].dMissing);
        for (int d = 0; d < 2; ++d) f.arm[z].yMissing[d] = to_double(o.arm[z].yMissing[d]);
        f.arm[z].bothMissing = to_double(o.arm[z].bothMissing);
    }
    return f;
}

template <class T> StructuralParams<double> to_float(const StructuralParams<T>& p) {
    StructuralParams<double> f;
    f.pZ = to_double(p.pZ);
    for (int i = 0; i < 3; ++i) f.piU[i] = to_double(p.piU[i]);
    f.ySupport = to_doubles(p.ySupport);
    for (int s = 0; s < 4; ++s) f.outcomeLaw[s] = to_doubles(p.outcomeLaw[s]);
    f.responseD.parents = p.responseD.parents;
    for (const auto& [k, v] : p.responseD.prob) f.responseD.prob[k] = to_double(v);
    f.responseY.parents = p.responseY.parents;
    for (const auto& [k, v] : p.responseY.prob) f.responseY.prob[k] = to_double(v);
    f.oneSided = p.oneSided;
    if (p.armLaw) {
        ArmTable<double> t;
        for (int z = 0; z < 2; ++z)
            for (int d = 0; d < 2; ++d) t[z][d] = to_doubles((*p.armLaw)[z][d]);
        f.armLaw = t;
    }
    return f;
}

Regime infer_regime(const std::vector<Record>& records) {
    bool dMiss = false, yMiss = false;
    for (const auto& r : records) {
        dMiss |= !r.d.has_value();
        yMiss |= !r.y.has_value();
    }
    if (dMiss && yMiss) return Regime::Both;
    if (dMiss) return Regime::TreatmentOnly;
    if (yMiss) return Regime::OutcomeOnly;
    return Regime::Complete;
}

#define IVMNAR_INSTANTIATE(T)                                                                       \
    template struct ObservableDistribution<T>;                                                      \
    template T arm_total(const ObservableDistribution<T>&, int);                                    \
    template ObservableDistribution<T> embed(const ObservableDistribution<T>&, Regime);             \
    template std::vector<std::string> check_observable(const ObservableDistribution<T>&, const Tolerances&); \
    template ObservableDistribution<double> to_float(const ObservableDistribution<T>&);             \
    template StructuralParams<double> to_float(const StructuralParams<T>&);

IVMNAR_INSTANTIATE(double)
IVMNAR_INSTANTIATE(Rational)

}  // namespace ivmnar
