#pragma once

#include "ivmnar/mechanism.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ivmnar {

enum class Recipe { DirectDivision, StratumSubtraction, OddsLinearSystem, BinaryRatio, MixtureSolve, Composite };
const char* to_string(Recipe r);

struct CatalogEntry {
    MechanismSpec spec;
    Recipe recipe = Recipe::DirectDivision;
    std::vector<Recipe> steps;  // non-empty only for Composite
    std::string proofAnchor;
    // Unidentifiable entries: the counterexample fixture (empty when none is printed).
    // Identifiable entries that fail only under the wrong sidedness also point at one.
    std::string fixtureId;
    bool fromTheorem = true;  // false for the complete-case MCAR entries and the saturated mechanisms
    int maxYSupport = 0;      // 0 = unlimited; otherwise per sidedness (see max_y_support)
    std::string note;
};

// Rank limit for 1Y-style systems: |Y| <= number of observed (z,d) equations.
int max_y_support(const CatalogEntry& e, bool oneSided);

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& lookup(std::string_view id);
JointVerdict joint_recoverability(std::string_view id);

std::string recipe_string(const CatalogEntry& e);

}  // namespace ivmnar
