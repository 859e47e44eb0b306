#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ivmnar {

enum class ComplianceType : std::uint8_t { AlwaysTaker = 0, Complier = 1, NeverTaker = 2 };

inline constexpr ComplianceType kTypes[] = {ComplianceType::AlwaysTaker, ComplianceType::Complier,
                                            ComplianceType::NeverTaker};

// D = 1 iff always-taker, or complier assigned Z = 1. Defiers have no representation.
constexpr int treatment(ComplianceType u, int z) {
    return (u == ComplianceType::AlwaysTaker || (u == ComplianceType::Complier && z == 1)) ? 1 : 0;
}

char type_label(ComplianceType u);
ComplianceType parse_type(char c);

// Variables that can be parents of a response indicator; order is the label order.
enum class Var : std::uint8_t { Z = 0, U = 1, D = 2, Y = 3, RD = 4 };
inline constexpr int kNumVars = 5;

struct VarSet {
    std::uint8_t bits = 0;
    bool has(Var v) const { return bits & (1u << static_cast<int>(v)); }
    VarSet& add(Var v) { bits |= (1u << static_cast<int>(v)); return *this; }
    bool empty() const { return bits == 0; }
    bool operator==(const VarSet&) const = default;
    std::string letters() const;  // "ZD", "UY" ... (RD omitted)
};

enum class Regime { Complete, OutcomeOnly, TreatmentOnly, Both };
enum class Sidedness { Either, OneSidedOnly, TwoSidedOnly };

const char* to_string(Regime r);
Regime parse_regime(std::string_view s);
const char* to_string(Sidedness s);

bool sidedness_allows(Sidedness s, bool oneSided);

// A response cell pattern: fixed values for some of (Z, U, D, Y, R^D), -1 = any.
// U is stored as its ComplianceType index; Y as an index into ySupport.
struct CellPattern {
    std::int8_t v[kNumVars] = {-1, -1, -1, -1, -1};
    bool matches(const std::int8_t key[kNumVars]) const;
    std::string to_string() const;
};

enum class Indicator { RD, RY };

struct PositivityCell {
    Indicator which;
    CellPattern cell;
    std::string label;  // e.g. "P(R^Y=1 | U=c, D=1) > 0"
};

struct DependenceCheck {
    std::string label;  // e.g. "Y !_|_ Z | D=d for d=0,1"
};

enum class JointVerdict { Yes, UnderExtraConditions, No };
const char* to_string(JointVerdict v);

struct MechanismSpec {
    std::string id;
    Regime regime = Regime::Complete;
    VarSet ryParents;
    VarSet rdParents;
    Sidedness sidednessRequired = Sidedness::Either;
    bool binaryYRequired = false;
    std::vector<PositivityCell> positivityCells;
    std::vector<DependenceCheck> dependenceChecks;
    bool identifiable = false;
    JointVerdict jointRecoverable = JointVerdict::No;
    bool jointNotStated = false;  // verdict is a placeholder: not established
};

// Label grammar:  MCAR-Y | MCAR-D | COMPLETE | 1<vars> | 2<vars> | 1<vars>(+)2<vars> | 1<vars>+2<vars>
// vars are letters from {Z,U,D,Y} in that order. "⊕" is accepted for "(+)".
struct ParsedLabel {
    Regime regime;
    VarSet ryParents;
    VarSet rdParents;
    bool mcar = false;
};

ParsedLabel parse_label(std::string_view label);
std::string normalize_label(std::string_view label);  // canonical ASCII
std::string pretty_label(std::string_view label);     // "(+)" -> "⊕"
std::string print_label(const ParsedLabel& p);

}  // namespace ivmnar
