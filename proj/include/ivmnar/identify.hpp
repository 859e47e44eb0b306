#pragma once

#include "ivmnar/catalog.hpp"
#include "ivmnar/forward.hpp"
#include "ivmnar/linalg.hpp"
#include "ivmnar/model.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ivmnar {

struct Diagnostic {
    std::string label;
    double magnitude = 0;  // normalized determinant or contrast
    double threshold = 0;  // 0 in exact mode (verdict is "nonzero")
    bool pass = false;
};

struct PositivityVerdict {
    std::string label;
    double mass = 0;  // the observable-implied mass that must be positive
    bool pass = false;
};

struct ConditionReport {
    std::string mechanism;
    bool identifiable = false;
    bool sidednessOk = false;
    bool supportOk = false;
    std::vector<PositivityVerdict> positivity;
    std::vector<Diagnostic> dependence;
    std::string stoppedAt;  // first error that prevented further evaluation, if any
    bool all_pass() const;
};

template <class T> struct IdentificationResult {
    std::string mechanism;
    T cace{};
    // [1] = E[Y | U=c, D=1], [0] = E[Y | U=c, D=0]; empty when only the CACE is identified
    std::optional<std::array<T, 2>> complierMeans;
    std::vector<std::pair<std::string, T>> nuisance;
    std::vector<Diagnostic> diagnostics;
    std::vector<PositivityVerdict> positivity;
    std::optional<JointLaw<T>> joint;
    std::string jointStatus;  // why the joint law is absent, or a note on how it was obtained
};

template <class T> struct BinaryRatioSolution {
    bool meansIdentified = false;
    T p1{};  // P(Y=1 | c, 1)
    T p0{};  // P(Y=1 | c, 0)
};

template <class T> struct JointRecovery {
    std::optional<JointLaw<T>> joint;
    std::string reason;
};

template <class T> T wald_cace(const ObservableDistribution<T>& obs, const Tolerances& tol = {});

template <class T>
std::vector<T> strip_stratum(const std::vector<T>& arm, const std::vector<T>& counterpart, const T& adjustment,
                             const Tolerances& tol = {});
// Per-cell adjustment, used when the ratio of response probabilities varies with y.
template <class T>
std::vector<T> strip_stratum(const std::vector<T>& arm, const std::vector<T>& counterpart, const std::vector<T>& adjustment,
                             const Tolerances& tol = {});

template <class T> BinaryRatioSolution<T> solve_binary_ratio(const T& r1, const T& r0, const Tolerances& tol = {});

template <class T>
IdentificationResult<T> identify(std::string_view mech, const ObservableDistribution<T>& obs, const Tolerances& tol = {});

template <class T>
JointRecovery<T> recover_joint(std::string_view mech, const ObservableDistribution<T>& obs, const Tolerances& tol = {});

template <class T>
ConditionReport check_conditions(std::string_view mech, const ObservableDistribution<T>& obs, const Tolerances& tol = {});

}  // namespace ivmnar
