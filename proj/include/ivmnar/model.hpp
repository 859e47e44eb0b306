#pragma once

#include "ivmnar/mechanism.hpp"
#include "ivmnar/numeric.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ivmnar {

// Key into a response table: one value per Var, -1 where the variable is not a parent.
using CellKey = std::array<std::int8_t, kNumVars>;

std::string cell_key_string(const CellKey& k);  // "z=1,u=c,d=0"
CellKey parse_cell_key(std::string_view s);

template <class T> struct ResponseTable {
    VarSet parents;
    std::map<CellKey, T> prob;  // P(R = 1 | parents = key)

    CellKey key_for(const std::int8_t full[kNumVars]) const {
        CellKey k;
        for (int i = 0; i < kNumVars; ++i)
            k[i] = parents.has(static_cast<Var>(i)) ? full[i] : std::int8_t(-1);
        return k;
    }
    const T* find(const std::int8_t full[kNumVars]) const {
        auto it = prob.find(key_for(full));
        return it == prob.end() ? nullptr : &it->second;
    }
};

// Outcome laws are indexed by the four consistent (type, d) pairs.
enum class Stratum : std::uint8_t { A1 = 0, N0 = 1, C0 = 2, C1 = 3 };
inline constexpr Stratum kStrata[] = {Stratum::A1, Stratum::N0, Stratum::C0, Stratum::C1};
const char* to_string(Stratum s);
ComplianceType stratum_type(Stratum s);
int stratum_d(Stratum s);
Stratum stratum_of(ComplianceType u, int d);

// P(D = d, Y = y | Z = z), indexed [z][d][y].
template <class T> using ArmTable = std::array<std::array<std::vector<T>, 2>, 2>;

template <class T> struct StructuralParams {
    T pZ = T(1) / T(2);
    std::array<T, 3> piU{};  // indexed by ComplianceType
    std::vector<T> ySupport{T(0), T(1)};
    std::array<std::vector<T>, 4> outcomeLaw;  // indexed by Stratum
    ResponseTable<T> responseD;
    ResponseTable<T> responseY;
    bool oneSided = false;

    // Several counterexamples are stated directly as P(D,Y|Z) tables (the Θ_{dy|z}
    // parameters) that need not split into nonnegative compliance strata. When set,
    // this replaces piU/outcomeLaw, U cannot be a response parent, and the CACE is
    // the Wald functional of the table.
    std::optional<ArmTable<T>> armLaw;

    T pi(ComplianceType u) const { return piU[static_cast<int>(u)]; }
    const std::vector<T>& law(Stratum s) const { return outcomeLaw[static_cast<int>(s)]; }
    std::size_t ny() const { return ySupport.size(); }
};

// Observable cells conditional on one arm. Which blocks are populated depends on the
// regime; unused blocks hold zeros.
template <class T> struct ArmCells {
    std::array<std::vector<T>, 2> full;  // D=d, Y=y, both observed
    std::vector<T> dMissing;             // Y=y observed, D missing
    std::array<T, 2> yMissing{};         // D=d observed, Y missing
    T bothMissing{};
};

template <class T> struct ObservableDistribution {
    Regime regime = Regime::Complete;
    T pZ = T(1) / T(2);
    std::vector<T> ySupport{T(0), T(1)};
    bool oneSided = false;
    std::array<ArmCells<T>, 2> arm;

    static constexpr bool exact = Num<T>::exact;
    std::size_t ny() const { return ySupport.size(); }

    // Zero-filled distribution with the right shapes.
    static ObservableDistribution zeros(Regime r, const T& pZ, std::vector<T> ySupport, bool oneSided);

    // Conventional cell names for the regime, e.g. "011|0", "0+0|1", "1+01|0", "+0+0|1".
    std::vector<std::pair<std::string, T>> named_cells() const;
    T& cell(const std::string& name);
    const T& cell(const std::string& name) const;
};

// Sum of the cells in arm z (1 for a valid distribution).
template <class T> T arm_total(const ObservableDistribution<T>& o, int z);

// Lift an observable to a richer regime (e.g. Complete -> OutcomeOnly): the new
// missing-data cells are zero.
template <class T> ObservableDistribution<T> embed(const ObservableDistribution<T>& o, Regime target);

// Structural problems with an observable table (ranges, per-arm sums, one-sided zeros).
template <class T> std::vector<std::string> check_observable(const ObservableDistribution<T>& o,
                                                             const Tolerances& tol = {});

template <class T> ObservableDistribution<double> to_float(const ObservableDistribution<T>& o);
template <class T> StructuralParams<double> to_float(const StructuralParams<T>& p);

struct Record {
    int z = 0;
    std::optional<int> d;
    std::optional<double> y;
    bool operator==(const Record&) const = default;
};

struct Dataset {
    std::vector<Record> records;
    Regime regime = Regime::Complete;
};

// The regime implied by which of d / y is ever missing.
Regime infer_regime(const std::vector<Record>& records);

}  // namespace ivmnar
