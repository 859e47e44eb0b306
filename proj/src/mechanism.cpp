#include "ivmnar/mechanism.hpp"

#include "ivmnar/errors.hpp"

namespace ivmnar {

char type_label(ComplianceType u) {
    switch (u) {
        case ComplianceType::AlwaysTaker: return 'a';
        case ComplianceType::Complier: return 'c';
        case ComplianceType::NeverTaker: return 'n';
    }
    return '?';
}

ComplianceType parse_type(char c) {
    switch (c) {
        case 'a': return ComplianceType::AlwaysTaker;
        case 'c': return ComplianceType::Complier;
        case 'n': return ComplianceType::NeverTaker;
    }
    throw Error(ErrorKind::ParseError, std::string("unknown compliance type '") + c + "'");
}

std::string VarSet::letters() const {
    static const char* names = "ZUDY";
    std::string out;
    for (int i = 0; i < 4; ++i)
        if (has(static_cast<Var>(i))) out += names[i];
    return out;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::Complete: return "Complete";
        case Regime::OutcomeOnly: return "OutcomeOnly";
        case Regime::TreatmentOnly: return "TreatmentOnly";
        case Regime::Both: return "Both";
    }
    return "?";
}

Regime parse_regime(std::string_view s) {
    if (s == "Complete") return Regime::Complete;
    if (s == "OutcomeOnly") return Regime::OutcomeOnly;
    if (s == "TreatmentOnly") return Regime::TreatmentOnly;
    if (s == "Both") return Regime::Both;
    throw Error(ErrorKind::ParseError, "unknown regime '" + std::string(s) + "'");
}

const char* to_string(Sidedness s) {
    switch (s) {
        case Sidedness::Either: return "Either";
        case Sidedness::OneSidedOnly: return "OneSidedOnly";
        case Sidedness::TwoSidedOnly: return "TwoSidedOnly";
    }
    return "?";
}

bool sidedness_allows(Sidedness s, bool oneSided) {
    if (s == Sidedness::OneSidedOnly) return oneSided;
    if (s == Sidedness::TwoSidedOnly) return !oneSided;
    return true;
}

const char* to_string(JointVerdict v) {
    switch (v) {
        case JointVerdict::Yes: return "Yes";
        case JointVerdict::UnderExtraConditions: return "UnderExtraConditions";
        case JointVerdict::No: return "No";
    }
    return "?";
}

bool CellPattern::matches(const std::int8_t key[kNumVars]) const {
    for (int i = 0; i < kNumVars; ++i)
        if (v[i] >= 0 && key[i] != v[i]) return false;
    return true;
}

std::string CellPattern::to_string() const {
    static const char* names[] = {"z", "u", "d", "y", "rd"};
    std::string out;
    for (int i = 0; i < kNumVars; ++i) {
        if (v[i] < 0) continue;
        if (!out.empty()) out += ',';
        out += names[i];
        out += '=';
        out += i == 1 ? std::string(1, type_label(static_cast<ComplianceType>(v[i]))) : std::to_string(v[i]);
    }
    return out;
}

namespace {

VarSet parse_vars(std::string_view s, std::string_view whole) {
    VarSet vs;
    int last = -1;
    for (char c : s) {
        int idx = std::string_view("ZUDY").find(c);
        if (idx < 0 || idx <= last)
            throw Error(ErrorKind::UnknownMechanism, "bad mechanism label '" + std::string(whole) + "'");
        vs.add(static_cast<Var>(idx));
        last = idx;
    }
    return vs;
}

std::string replace_oplus(std::string_view s) {
    std::string out(s);
    const std::string glyph = "\xE2\x8A\x95";  // ⊕
    for (auto p = out.find(glyph); p != std::string::npos; p = out.find(glyph))
        out.replace(p, glyph.size(), "(+)");
    return out;
}

}  // namespace

ParsedLabel parse_label(std::string_view raw) {
    std::string s = replace_oplus(raw);
    ParsedLabel p{};
    if (s == "COMPLETE") { p.regime = Regime::Complete; return p; }
    if (s == "MCAR-Y") { p.regime = Regime::OutcomeOnly; p.mcar = true; return p; }
    if (s == "MCAR-D") { p.regime = Regime::TreatmentOnly; p.mcar = true; return p; }
    auto bad = [&] { return Error(ErrorKind::UnknownMechanism, "bad mechanism label '" + std::string(raw) + "'"); };
    if (s.size() < 2) throw bad();
    if (s[0] == '2') {
        p.regime = Regime::TreatmentOnly;
        p.rdParents = parse_vars(std::string_view(s).substr(1), raw);
        if (p.rdParents.empty()) throw bad();
        return p;
    }
    if (s[0] != '1') throw bad();
    auto two = s.find('2');
    if (two == std::string::npos) {
        p.regime = Regime::OutcomeOnly;
        p.ryParents = parse_vars(std::string_view(s).substr(1), raw);
        if (p.ryParents.empty()) throw bad();
        return p;
    }
    std::string_view head = std::string_view(s).substr(1, two - 1);
    bool oplus = false;
    if (head.size() >= 3 && head.substr(head.size() - 3) == "(+)") {
        oplus = true;
        head.remove_suffix(3);
    } else if (!head.empty() && head.back() == '+') {
        head.remove_suffix(1);
    } else {
        throw bad();
    }
    p.regime = Regime::Both;
    p.ryParents = parse_vars(head, raw);
    p.rdParents = parse_vars(std::string_view(s).substr(two + 1), raw);
    if (p.ryParents.empty() || p.rdParents.empty()) throw bad();
    if (oplus) p.ryParents.add(Var::RD);
    return p;
}

std::string print_label(const ParsedLabel& p) {
    switch (p.regime) {
        case Regime::Complete: return "COMPLETE";
        case Regime::OutcomeOnly: return p.mcar ? "MCAR-Y" : "1" + p.ryParents.letters();
        case Regime::TreatmentOnly: return p.mcar ? "MCAR-D" : "2" + p.rdParents.letters();
        case Regime::Both:
            return "1" + p.ryParents.letters() + (p.ryParents.has(Var::RD) ? "(+)" : "+") + "2" +
                   p.rdParents.letters();
    }
    return {};
}

std::string normalize_label(std::string_view label) { return print_label(parse_label(label)); }

std::string pretty_label(std::string_view label) {
    std::string s = normalize_label(label);
    auto p = s.find("(+)");
    if (p != std::string::npos) s.replace(p, 3, "\xE2\x8A\x95");
    return s;
}

}  // namespace ivmnar
