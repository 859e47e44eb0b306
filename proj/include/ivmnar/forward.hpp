#pragma once

#include "ivmnar/mechanism.hpp"
#include "ivmnar/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ivmnar {

// One atom of P(Z, U, D, Y): u = -1 when the law is given at the arm level.
template <class T> struct JointEntry {
    int z, u, d, y;
    T prob;
};
template <class T> using JointLaw = std::vector<JointEntry<T>>;

// One atom of the full law over (Z, U, D, Y, R^D, R^Y).
template <class T> struct Atom {
    int z, u, d, y, rd, ry;
    T prob;
};

// Full: every identification condition of the mechanism (sidedness, binary Y, positivity).
// Generative: only what is needed for the params to define a law under the mechanism;
// the forward map uses this so counterexamples can be pushed through mechanisms whose
// sidedness they violate.
enum class ValidationScope { Full, Generative };

template <class T>
std::vector<std::string> validate(const StructuralParams<T>& params, const MechanismSpec& mech, const Tolerances& tol = {},
                                  ValidationScope scope = ValidationScope::Full);

template <class T> T true_cace(const StructuralParams<T>& params);

// (E[Y|Z=1]-E[Y|Z=0]) / (P(D=1|Z=1)-P(D=1|Z=0)) on a P(D,Y|Z) table.
template <class T> T wald_from_table(const ArmTable<T>& q, const std::vector<T>& ySupport, double tolProb = 1e-12);

// P(D=d, Y=y | Z=z) implied by the params (no missingness).
template <class T> ArmTable<T> arm_table(const StructuralParams<T>& params);

// P(Z, U, D, Y) in canonical order: z, then u in (a, c, n), then y.
template <class T> JointLaw<T> structural_joint(const StructuralParams<T>& params);

// Dense table of the full law; zero-mass latent cells are skipped.
template <class T> std::vector<Atom<T>> joint_atoms(const StructuralParams<T>& params, const MechanismSpec& mech);

template <class T> ObservableDistribution<T> forward_observable(const StructuralParams<T>& params, const MechanismSpec& mech);

// The fully observed table P(D, Y | Z) as a Complete-regime distribution.
template <class T> ObservableDistribution<T> complete_observable(const StructuralParams<T>& params);

// Drop to the Complete regime; fails if any missing-data cell carries mass.
template <class T> ObservableDistribution<T> to_complete(const ObservableDistribution<T>& obs, double tolProb = 1e-12);

// Inverse-CDF sampling from the dense joint with std::mt19937_64(seed); each draw uses
// one 64-bit output u, mapped to (u >> 11) * 2^-53 in [0,1).
Dataset sample_dataset(const StructuralParams<double>& params, const MechanismSpec& mech, std::size_t n,
                       std::uint64_t seed);

}  // namespace ivmnar
