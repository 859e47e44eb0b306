#include "ivmnar/io.hpp"

#include "ivmnar/errors.hpp"

#include <fstream>
#include <sstream>

namespace ivmnar {

template <> json number_to_json<double>(const double& x) { return x; }
template <> json number_to_json<Rational>(const Rational& x) { return format(x); }

template <class T> T number_from_json(const json& j) {
    if (j.is_string()) return parse_prob<T>(j.get<std::string>());
    if (j.is_number_integer()) return T(j.get<long long>());
    if (j.is_number()) return from_double<T>(j.get<double>());
    throw Error(ErrorKind::ParseError, "expected a number or \"p/q\" string, got " + j.dump());
}

namespace {

const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
    return j.at(key);
}

template <class T> std::vector<T> vec_from_json(const json& j) {
    if (!j.is_array()) throw Error(ErrorKind::ParseError, "expected an array, got " + j.dump());
    std::vector<T> v;
    for (const auto& x : j) v.push_back(number_from_json<T>(x));
    return v;
}

template <class T> json vec_to_json(const std::vector<T>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(number_to_json(x));
    return a;
}

// An outcome law is either a full vector over ySupport or, for binary Y, P(Y = second value).
template <class T> std::vector<T> law_from_json(const json& j, std::size_t ny) {
    if (j.is_array()) return vec_from_json<T>(j);
    if (ny != 2) throw Error(ErrorKind::ParseError, "scalar outcome law needs a binary ySupport");
    T p1 = number_from_json<T>(j);
    return {T(1) - p1, p1};
}

// All keys over the given parent set.
std::vector<CellKey> enumerate_keys(VarSet parents, std::size_t ny) {
    std::vector<CellKey> keys(1);
    keys[0].fill(-1);
    const int range[kNumVars] = {2, 3, 2, static_cast<int>(ny), 2};
    for (int i = 0; i < kNumVars; ++i) {
        if (!parents.has(static_cast<Var>(i))) continue;
        std::vector<CellKey> next;
        for (const auto& k : keys)
            for (int v = 0; v < range[i]; ++v) {
                auto n = k;
                n[i] = static_cast<std::int8_t>(v);
                next.push_back(n);
            }
        keys = std::move(next);
    }
    return keys;
}

template <class T> ResponseTable<T> response_from_json(const json& j, VarSet parents, std::size_t ny, const char* what) {
    ResponseTable<T> t;
    t.parents = parents;
    if (!j.is_object()) {
        T v = number_from_json<T>(j);
        for (const auto& k : enumerate_keys(parents, ny)) t.prob[k] = v;
        return t;
    }
    for (const auto& [name, val] : j.items()) {
        CellKey k = parse_cell_key(name);
        for (int i = 0; i < kNumVars; ++i) {
            bool set = k[i] >= 0;
            if (set != parents.has(static_cast<Var>(i)))
                throw Error(ErrorKind::ParseError, std::string(what) + " key '" + name + "' does not match the mechanism's parents");
        }
        if (k[3] >= static_cast<int>(ny) || k[2] > 1 || k[0] > 1 || k[4] > 1)
            throw Error(ErrorKind::ParseError, std::string(what) + " key '" + name + "' out of range");
        t.prob[k] = number_from_json<T>(val);
    }
    return t;
}

template <class T> json response_to_json(const ResponseTable<T>& t) {
    json o = json::object();
    for (const auto& [k, v] : t.prob) o[cell_key_string(k)] = number_to_json(v);
    return o;
}

bool uses_rd(Regime r) { return r == Regime::TreatmentOnly || r == Regime::Both; }
bool uses_ry(Regime r) { return r == Regime::OutcomeOnly || r == Regime::Both; }

std::string parents_string(VarSet v) {
    std::string s = v.letters();
    if (v.has(Var::RD)) s += s.empty() ? "R^D" : ",R^D";
    return s.empty() ? "-" : s;
}

}  // namespace

template <class T> StructuralParams<T> params_from_json(const json& j, const MechanismSpec& mech) {
    StructuralParams<T> p;
    if (j.contains("pZ")) p.pZ = number_from_json<T>(j.at("pZ"));
    if (j.contains("ySupport")) p.ySupport = vec_from_json<T>(j.at("ySupport"));
    p.oneSided = j.value("oneSided", false);
    const auto ny = p.ny();
    if (j.contains("armLaw")) {
        ArmTable<T> q;
        const auto& a = j.at("armLaw");
        for (int z = 0; z < 2; ++z) {
            const auto& az = need(a, z ? "z1" : "z0");
            for (int d = 0; d < 2; ++d) {
                const char* dk = d ? "d1" : "d0";
                q[z][d] = az.contains(dk) ? vec_from_json<T>(az.at(dk)) : std::vector<T>(ny, T(0));
            }
        }
        p.armLaw = q;
    } else {
        const auto& pu = need(j, "piU");
        for (auto u : kTypes) {
            std::string key(1, type_label(u));
            p.piU[static_cast<int>(u)] = pu.contains(key) ? number_from_json<T>(pu.at(key)) : T(0);
        }
        const auto& laws = need(j, "outcomeLaw");
        for (auto s : kStrata)
            if (laws.contains(to_string(s))) p.outcomeLaw[static_cast<int>(s)] = law_from_json<T>(laws.at(to_string(s)), ny);
    }
    if (uses_rd(mech.regime)) p.responseD = response_from_json<T>(need(j, "responseD"), mech.rdParents, ny, "responseD");
    else if (j.contains("responseD")) throw Error(ErrorKind::ParseError, "responseD given but mechanism " + mech.id + " observes D");
    if (uses_ry(mech.regime)) p.responseY = response_from_json<T>(need(j, "responseY"), mech.ryParents, ny, "responseY");
    else if (j.contains("responseY")) throw Error(ErrorKind::ParseError, "responseY given but mechanism " + mech.id + " observes Y");
    return p;
}

template <class T> ParamsConfig<T> params_config_from_json(const json& j) {
    ParamsConfig<T> c;
    const auto& entry = lookup(need(j, "mechanism").get<std::string>());
    c.mechanism = entry.spec.id;
    c.params = params_from_json<T>(j, entry.spec);
    return c;
}

template <class T> json params_to_json(const StructuralParams<T>& p, const std::string& mechanism) {
    json j = json::object();
    if (!mechanism.empty()) j["mechanism"] = mechanism;
    j["pZ"] = number_to_json(p.pZ);
    j["ySupport"] = vec_to_json(p.ySupport);
    j["oneSided"] = p.oneSided;
    if (p.armLaw) {
        json a = json::object();
        for (int z = 0; z < 2; ++z)
            a[z ? "z1" : "z0"] = {{"d0", vec_to_json((*p.armLaw)[z][0])}, {"d1", vec_to_json((*p.armLaw)[z][1])}};
        j["armLaw"] = a;
    } else {
        json pu = json::object();
        for (auto u : {ComplianceType::AlwaysTaker, ComplianceType::NeverTaker, ComplianceType::Complier})
            pu[std::string(1, type_label(u))] = number_to_json(p.pi(u));
        j["piU"] = pu;
        json laws = json::object();
        for (auto s : kStrata)
            if (!p.law(s).empty()) laws[to_string(s)] = vec_to_json(p.law(s));
        j["outcomeLaw"] = laws;
    }
    if (!p.responseD.prob.empty()) j["responseD"] = response_to_json(p.responseD);
    if (!p.responseY.prob.empty()) j["responseY"] = response_to_json(p.responseY);
    return j;
}

template <class T> ObservableDistribution<T> observable_from_json(const json& j) {
    Regime r = parse_regime(need(j, "regime").get<std::string>());
    T pZ = j.contains("pZ") ? number_from_json<T>(j.at("pZ")) : T(1) / T(2);
    std::vector<T> ys = j.contains("ySupport") ? vec_from_json<T>(j.at("ySupport")) : std::vector<T>{T(0), T(1)};
    auto o = ObservableDistribution<T>::zeros(r, pZ, ys, j.value("oneSided", false));
    // cells not listed are zero (the usual way to write structural zeros)
    for (const auto& [name, val] : need(j, "cells").items()) o.cell(name) = number_from_json<T>(val);
    return o;
}

template <class T> json observable_to_json(const ObservableDistribution<T>& o) {
    json j = json::object();
    j["regime"] = to_string(o.regime);
    j["pZ"] = number_to_json(o.pZ);
    j["ySupport"] = vec_to_json(o.ySupport);
    j["oneSided"] = o.oneSided;
    json cells = json::object();
    for (const auto& [name, v] : o.named_cells()) cells[name] = number_to_json(v);
    j["cells"] = cells;
    return j;
}

template <class T> json joint_to_json(const JointLaw<T>& joint) {
    json a = json::array();
    for (const auto& e : joint) {
        json row = {{"z", e.z}};
        row["u"] = e.u < 0 ? json(nullptr) : json(std::string(1, type_label(static_cast<ComplianceType>(e.u))));
        row["d"] = e.d;
        row["y"] = e.y;
        row["p"] = number_to_json(e.prob);
        a.push_back(row);
    }
    return a;
}

namespace {
json diagnostics_json(const std::vector<Diagnostic>& ds) {
    json a = json::array();
    for (const auto& d : ds)
        a.push_back({{"label", d.label}, {"magnitude", d.magnitude}, {"threshold", d.threshold}, {"pass", d.pass}});
    return a;
}
json positivity_json(const std::vector<PositivityVerdict>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back({{"label", p.label}, {"mass", p.mass}, {"pass", p.pass}});
    return a;
}
}  // namespace

template <class T> json result_to_json(const IdentificationResult<T>& r) {
    json j = json::object();
    j["mechanism"] = r.mechanism;
    j["cace"] = number_to_json(r.cace);
    if (r.complierMeans) {
        j["complierMeans"] = {{"d1", number_to_json((*r.complierMeans)[1])}, {"d0", number_to_json((*r.complierMeans)[0])}};
    } else {
        j["complierMeans"] = nullptr;
    }
    json nu = json::object();
    for (const auto& [k, v] : r.nuisance) nu[k] = number_to_json(v);
    j["nuisance"] = nu;
    j["diagnostics"] = diagnostics_json(r.diagnostics);
    j["positivity"] = positivity_json(r.positivity);
    j["joint"] = r.joint ? joint_to_json(*r.joint) : json(nullptr);
    j["jointStatus"] = r.jointStatus;
    return j;
}

json report_to_json(const ConditionReport& r) {
    return {{"mechanism", r.mechanism},
            {"identifiable", r.identifiable},
            {"sidednessOk", r.sidednessOk},
            {"supportOk", r.supportOk},
            {"positivity", positivity_json(r.positivity)},
            {"dependence", diagnostics_json(r.dependence)},
            {"stoppedAt", r.stoppedAt},
            {"allPass", r.all_pass()}};
}

json catalog_entry_to_json(const CatalogEntry& e) {
    const auto& s = e.spec;
    json pos = json::array(), dep = json::array();
    for (const auto& p : s.positivityCells) pos.push_back(p.label);
    for (const auto& d : s.dependenceChecks) dep.push_back(d.label);
    std::string joint = s.identifiable ? to_string(s.jointRecoverable) : "-";
    if (s.identifiable && s.jointNotStated) joint += " (not stated)";
    return {{"id", s.id},
            {"label", pretty_label(s.id)},
            {"regime", to_string(s.regime)},
            {"rdParents", parents_string(s.rdParents)},
            {"ryParents", parents_string(s.ryParents)},
            {"sidedness", to_string(s.sidednessRequired)},
            {"binaryY", s.binaryYRequired},
            {"positivity", pos},
            {"dependence", dep},
            {"identifiable", s.identifiable},
            {"joint", joint},
            {"recipe", recipe_string(e)},
            {"citation", e.proofAnchor},
            {"fixture", e.fixtureId},
            {"note", e.note}};
}

json catalog_to_json() {
    json a = json::array();
    for (const auto& e : catalog()) a.push_back(catalog_entry_to_json(e));
    return a;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json(const std::filesystem::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
    }
}

#define IVMNAR_IO(T)                                                                          \
    template T number_from_json<T>(const json&);                                              \
    template StructuralParams<T> params_from_json<T>(const json&, const MechanismSpec&);      \
    template ParamsConfig<T> params_config_from_json<T>(const json&);                         \
    template json params_to_json(const StructuralParams<T>&, const std::string&);             \
    template ObservableDistribution<T> observable_from_json<T>(const json&);                  \
    template json observable_to_json(const ObservableDistribution<T>&);                       \
    template json joint_to_json(const JointLaw<T>&);                                          \
    template json result_to_json(const IdentificationResult<T>&);

IVMNAR_IO(double)
IVMNAR_IO(Rational)

}  // namespace ivmnar
