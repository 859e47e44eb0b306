#include "ivmnar/catalog.hpp"

#include "ivmnar/errors.hpp"
#include "ivmnar/model.hpp"

#include <map>

namespace ivmnar {

const char* to_string(Recipe r) {
    switch (r) {
        case Recipe::DirectDivision: return "DirectDivision";
        case Recipe::StratumSubtraction: return "StratumSubtraction";
        case Recipe::OddsLinearSystem: return "OddsLinearSystem";
        case Recipe::BinaryRatio: return "BinaryRatio";
        case Recipe::MixtureSolve: return "MixtureSolve";
        case Recipe::Composite: return "Composite";
    }
    return "?";
}

std::string recipe_string(const CatalogEntry& e) {
    if (!e.spec.identifiable) return "-";
    if (e.recipe != Recipe::Composite) return to_string(e.recipe);
    std::string s = "Composite(";
    for (std::size_t i = 0; i < e.steps.size(); ++i) s += (i ? "," : "") + std::string(to_string(e.steps[i]));
    return s + ")";
}

int max_y_support(const CatalogEntry& e, bool oneSided) {
    if (e.maxYSupport == 0) return 0;
    return oneSided ? e.maxYSupport - 1 : e.maxYSupport;
}

namespace {

using R = Recipe;
constexpr auto RY = Indicator::RY;
constexpr auto RD = Indicator::RD;

PositivityCell pos(Indicator which, std::string_view pattern, std::string label) {
    PositivityCell c{which, {}, std::move(label)};
    CellKey k = parse_cell_key(pattern);
    for (int i = 0; i < kNumVars; ++i) c.cell.v[i] = k[i];
    return c;
}

struct Builder {
    std::vector<CatalogEntry> rows;

    CatalogEntry& add(std::string id, bool identifiable, Sidedness side, bool binaryY, std::vector<Recipe> recipe,
                      std::string anchor) {
        auto p = parse_label(id);
        CatalogEntry e;
        e.spec.id = print_label(p);
        e.spec.regime = p.regime;
        e.spec.ryParents = p.ryParents;
        e.spec.rdParents = p.rdParents;
        e.spec.sidednessRequired = side;
        e.spec.binaryYRequired = binaryY;
        e.spec.identifiable = identifiable;
        e.spec.jointRecoverable = JointVerdict::UnderExtraConditions;
        e.spec.jointNotStated = identifiable;
        if (recipe.size() == 1) {
            e.recipe = recipe[0];
        } else if (!recipe.empty()) {
            e.recipe = Recipe::Composite;
            e.steps = std::move(recipe);
        }
        e.proofAnchor = std::move(anchor);
        rows.push_back(std::move(e));
        return rows.back();
    }
};

CatalogEntry& joint(CatalogEntry& e, JointVerdict v) {
    e.spec.jointRecoverable = v;
    e.spec.jointNotStated = false;
    return e;
}
CatalogEntry& positivity(CatalogEntry& e, std::vector<PositivityCell> cells) {
    e.spec.positivityCells = std::move(cells);
    return e;
}
CatalogEntry& dependence(CatalogEntry& e, std::vector<std::string> labels) {
    for (auto& l : labels) e.spec.dependenceChecks.push_back({std::move(l)});
    return e;
}

// Frequently repeated condition texts.
const char* kDepYZgivenD = "dep(Y, Z | D=d) for d=0,1";
const char* kDepYDgivenZ = "dep(Y, D | Z=z) for z=1 (one-sided) or z=0,1 (two-sided)";
const char* kDepYDgivenZ2 = "dep(Y, D | Z=z) for z=0,1";
const char* kDepYdagger = "dep(Y+, D | Z=z) with Y+ = (Y*R^Y, R^Y), z=1 (one-sided) or z=0,1 (two-sided)";
const char* kMixture = "dep(Y, U | Z=1): never-taker and complier arm laws differ (mixture weight solvable)";

std::vector<CatalogEntry> build() {
    Builder b;
    const auto E = Sidedness::Either, ONE = Sidedness::OneSidedOnly, TWO = Sidedness::TwoSidedOnly;

    // complete-case entries
    {
        auto& e = b.add("MCAR-Y", true, E, false, {R::DirectDivision}, "outcome MCAR: complete cases are a random subsample, Wald on them");
        e.fromTheorem = false;
        joint(e, JointVerdict::Yes);
        positivity(e, {pos(RY, "", "P(R^Y=1) > 0")});
        auto& f = b.add("MCAR-D", true, E, false, {R::DirectDivision}, "treatment MCAR: complete cases are a random subsample, Wald on them");
        f.fromTheorem = false;
        joint(f, JointVerdict::Yes);
        positivity(f, {pos(RD, "", "P(R^D=1) > 0")});
    }

    // outcome missing only
    positivity(joint(b.add("1ZD", true, E, false, {R::DirectDivision}, "outcome-missing, R^Y on (Z,D): divide by response rate"), JointVerdict::Yes),
               {pos(RY, "", "P(R^Y=1 | Z=z, D=d) > 0 for all z, d")});
    positivity(joint(b.add("1UD", true, E, false, {R::StratumSubtraction}, "outcome-missing, R^Y on (U,D): strip never-/always-taker cells across arms, normalize complier laws"),
                     JointVerdict::UnderExtraConditions),
               {pos(RY, "u=c", "P(R^Y=1 | U=c, D=d) > 0 for d=0,1")});
    dependence(positivity(joint(b.add("1DY", true, TWO, true, {R::OddsLinearSystem}, "outcome-missing, R^Y on (D,Y): per-d odds system across the two arms"),
                                JointVerdict::Yes),
                          {pos(RY, "", "P(R^Y=1 | D=d, Y=y) > 0 for all d, y")}),
               {kDepYZgivenD})
        .fixtureId = "S3.1.1";
    dependence(positivity(joint(b.add("1ZY", true, TWO, true, {R::OddsLinearSystem}, "outcome-missing, R^Y on (Z,Y): per-z odds system across the two treatment levels"),
                                JointVerdict::Yes),
                          {pos(RY, "", "P(R^Y=1 | Z=z, Y=y) > 0 for all z, y")}),
               {kDepYDgivenZ2})
        .fixtureId = "S3.1.2";
    positivity(joint(b.add("1UY", true, E, true, {R::StratumSubtraction, R::BinaryRatio}, "outcome-missing, R^Y on (U,Y): strip never-takers, solve the complier ratio equations"),
                     JointVerdict::No),
               {pos(RY, "u=c", "P(R^Y=1 | U=c, Y=y) > 0 for y=0,1")});
    {
        auto& e = dependence(positivity(b.add("1Y", true, E, false, {R::OddsLinearSystem}, "outcome-missing, R^Y on Y only: odds system over all observed (z,d) rows"),
                                        {pos(RY, "", "P(R^Y=1 | Y=y) > 0 for all y")}),
                             {"dep(Y, (Z,D)): rank of the observed (z,d) x y cell matrix equals |Y|"});
        e.maxYSupport = 4;
        e.note = "|Y| <= 4 two-sided, <= 3 one-sided";
    }

    // treatment missing only
    positivity(joint(b.add("2ZY", true, E, false, {R::DirectDivision}, "treatment-missing, R^D on (Z,Y): divide by response rate"), JointVerdict::Yes),
               {pos(RD, "", "P(R^D=1 | Z=z, Y=y) > 0 for all z, y")});
    {
        auto& e = positivity(b.add("2UY", true, E, true, {R::StratumSubtraction, R::BinaryRatio}, "treatment-missing, R^D on (U,Y): strip never-takers, solve the complier ratio equations"),
                             {pos(RD, "u=c", "P(R^D=1 | U=c, Y=y) > 0 for y=0,1")});
        joint(e, JointVerdict::UnderExtraConditions);
        e.note = "joint law: one-sided only, needs P(Y=1|c,0) != P(Y=1|c,1)";
    }
    dependence(positivity(joint(b.add("2DY", true, E, false, {R::OddsLinearSystem}, "treatment-missing, R^D on (D,Y): per-y odds system across arms"),
                                JointVerdict::Yes),
                          {pos(RD, "", "P(R^D=1 | D=d, Y=y) > 0 for all d, y")}),
               {"dep(D, Z | Y=y) for all y (two-sided only)"});
    positivity(joint(b.add("2UD", true, E, false, {R::StratumSubtraction}, "treatment-missing, R^D on (U,D): odds per stratum from the D-missing cells"),
                     JointVerdict::UnderExtraConditions),
               {pos(RD, "u=c", "P(R^D=1 | U=c, D=d) > 0 for d=0,1")});
    dependence(positivity(joint(b.add("2ZD", true, E, false, {R::OddsLinearSystem}, "treatment-missing, R^D on (Z,D): per-z odds system over y"),
                                JointVerdict::Yes),
                          {pos(RD, "", "P(R^D=1 | Z=z, D=d) > 0 for all z, d")}),
               {kDepYDgivenZ});
    dependence(positivity(joint(b.add("2ZU", true, ONE, false, {R::MixtureSolve}, "treatment-missing, R^D on (Z,U): one-dimensional mixture for the Z=1 never-taker share"),
                                JointVerdict::Yes),
                          {pos(RD, "z=1", "P(R^D=1 | Z=1, U=u) > 0 for u=n,c")}),
               {kMixture})
        .fixtureId = "S3.2.1";

    // both missing, R^D depends on (U,D); R^Y may depend on R^D
    positivity(b.add("1ZD(+)2UD", true, E, false, {R::StratumSubtraction}, "R^D on (U,D), R^Y on (Z,D,R^D): per-stratum thinning by R^D, then the 1ZD recipe"),
               {pos(RD, "u=c", "P(R^D=1 | U=c, D=d) > 0 for d=0,1"),
                pos(RY, "rd=1", "P(R^Y=1 | Z=z, D=d, R^D=1) > 0 for all z, d")});
    positivity(b.add("1UD(+)2UD", true, E, false, {R::StratumSubtraction}, "R^D on (U,D), R^Y on (U,D,R^D): per-stratum thinning by R^D, then the 1UD recipe"),
               {pos(RD, "u=c", "P(R^D=1 | U=c, D=d) > 0 for d=0,1"),
                pos(RY, "u=c,rd=1", "P(R^Y=1 | U=c, D=d, R^D=1) > 0 for d=0,1")});
    dependence(positivity(b.add("1DY(+)2UD", true, TWO, true, {R::StratumSubtraction, R::OddsLinearSystem},
                                "R^D on (U,D), R^Y on (D,Y,R^D): per-stratum thinning by R^D, then the 1DY recipe"),
                          {pos(RD, "u=c", "P(R^D=1 | U=c, D=d) > 0 for d=0,1"),
                           pos(RY, "rd=1", "P(R^Y=1 | D=d, Y=y, R^D=1) > 0 for all d, y")}),
               {"dep(Y, Z | D=d, R^D=1) for d=0,1"});
    dependence(positivity(b.add("1ZY(+)2UD", true, TWO, true, {R::StratumSubtraction, R::OddsLinearSystem},
                                "R^D on (U,D), R^Y on (Z,Y,R^D): per-stratum thinning by R^D, then the 1ZY recipe"),
                          {pos(RD, "u=c", "P(R^D=1 | U=c, D=d) > 0 for d=0,1"),
                           pos(RY, "rd=1", "P(R^Y=1 | Z=z, Y=y, R^D=1) > 0 for all z, y")}),
               {"dep(Y, D | Z=z, R^D=1) for z=0,1"});
    positivity(b.add("1UY(+)2UD", true, E, true, {R::StratumSubtraction, R::BinaryRatio}, "R^D on (U,D), R^Y on (U,Y,R^D): per-stratum thinning by R^D, then the 1UY recipe"),
               {pos(RD, "u=c", "P(R^D=1 | U=c, D=d) > 0 for d=0,1"),
                pos(RY, "u=c,rd=1", "P(R^Y=1 | U=c, Y=y, R^D=1) > 0 for y=0,1")});

    // both missing, R^D depends on (Z,D); R^Y does not depend on R^D
    const auto rdZD = pos(RD, "", "P(R^D=1 | Z=z, D=d) > 0 for all z, d");
    dependence(positivity(b.add("1ZD+2ZD", true, E, false, {R::OddsLinearSystem, R::DirectDivision}, "R^D on (Z,D), R^Y on (Z,D): stacked odds system on the augmented outcome, then divide"),
                          {rdZD, pos(RY, "", "P(R^Y=1 | Z=z, D=d) > 0 for all z, d")}),
               {kDepYdagger});
    dependence(positivity(b.add("1UD+2ZD", true, E, false, {R::OddsLinearSystem, R::StratumSubtraction}, "R^D on (Z,D), R^Y on (U,D): augmented-outcome odds system, then strip strata"),
                          {rdZD, pos(RY, "u=c", "P(R^Y=1 | U=c, D=d) > 0 for d=0,1")}),
               {kDepYdagger});
    dependence(positivity(b.add("1DY+2ZD", true, TWO, true, {R::OddsLinearSystem}, "R^D on (Z,D), R^Y on (D,Y): augmented-outcome odds system, then the outcome odds system"),
                          {rdZD, pos(RY, "", "P(R^Y=1 | D=d, Y=y) > 0 for all d, y")}),
               {"dep(Y+, D | Z=z) with Y+ = (Y*R^Y, R^Y), z=0,1", kDepYZgivenD});
    dependence(positivity(b.add("1ZY+2ZD", true, TWO, true, {R::OddsLinearSystem}, "R^D on (Z,D), R^Y on (Z,Y): augmented-outcome odds system, then the outcome odds system"),
                          {rdZD, pos(RY, "", "P(R^Y=1 | Z=z, Y=y) > 0 for all z, y")}),
               {kDepYDgivenZ2});
    dependence(positivity(b.add("1UY+2ZD", true, E, true, {R::OddsLinearSystem, R::StratumSubtraction, R::BinaryRatio},
                                "R^D on (Z,D), R^Y on (U,Y): augmented-outcome odds system, then the complier ratio equations"),
                          {rdZD, pos(RY, "u=c", "P(R^Y=1 | U=c, Y=y) > 0 for y=0,1")}),
               {kDepYdagger});

    // both missing, R^D depends on (Z,U); one-sided only
    const auto rdZU = pos(RD, "z=1", "P(R^D=1 | Z=1, U=u) > 0 for u=n,c");
    dependence(positivity(b.add("1ZD+2ZU", true, ONE, false, {R::DirectDivision, R::MixtureSolve}, "R^D on (Z,U), R^Y on (Z,D): divide, then solve the never-taker mixture"),
                          {rdZU, pos(RY, "", "P(R^Y=1 | Z=z, D=d) > 0 for (z,d) = (1,1),(1,0),(0,0)")}),
               {kMixture});
    dependence(positivity(b.add("1UD+2ZU", true, ONE, false, {R::MixtureSolve}, "R^D on (Z,U), R^Y on (U,D): mixture solve on the fully observed cells"),
                          {rdZU, pos(RY, "u=c", "P(R^Y=1 | U=c, D=d) > 0 for d=0,1")}),
               {kMixture});
    dependence(positivity(b.add("1UY+2ZU", true, ONE, true, {R::MixtureSolve, R::BinaryRatio}, "R^D on (Z,U), R^Y on (U,Y): mixture solve, then the complier ratio equations"),
                          {rdZU, pos(RY, "u=c", "P(R^Y=1 | U=c, Y=y) > 0 for y=0,1")}),
               {kMixture});

    // R^D depends on Z only; R^Y may depend on R^D
    const auto rdZ = pos(RD, "", "P(R^D=1 | Z=z) > 0 for z=0,1");
    positivity(b.add("1ZD(+)2Z", true, E, false, {R::DirectDivision}, "R^D on Z, R^Y on (Z,D,R^D): divide the R^D=1 cells by P(R^D=1|Z), then the 1ZD recipe"),
               {rdZ, pos(RY, "rd=1", "P(R^Y=1 | Z=z, D=d, R^D=1) > 0 for all z, d")});
    positivity(b.add("1UD(+)2Z", true, E, false, {R::StratumSubtraction}, "R^D on Z, R^Y on (U,D,R^D): divide the R^D=1 cells by P(R^D=1|Z), then the 1UD recipe"),
               {rdZ, pos(RY, "u=c,rd=1", "P(R^Y=1 | U=c, D=d, R^D=1) > 0 for d=0,1")});
    positivity(b.add("1UY(+)2Z", true, E, true, {R::StratumSubtraction, R::BinaryRatio}, "R^D on Z, R^Y on (U,Y,R^D): divide the R^D=1 cells by P(R^D=1|Z), then the 1UY recipe"),
               {rdZ, pos(RY, "u=c,rd=1", "P(R^Y=1 | U=c, Y=y, R^D=1) > 0 for y=0,1")});
    dependence(positivity(b.add("1DY(+)2Z", true, TWO, true, {R::OddsLinearSystem}, "R^D on Z, R^Y on (D,Y,R^D): divide the R^D=1 cells by P(R^D=1|Z), then the 1DY recipe"),
                          {rdZ, pos(RY, "rd=1", "P(R^Y=1 | D=d, Y=y, R^D=1) > 0 for all d, y")}),
               {"dep(Y, Z | D=d, R^D=1) for d=0,1"});
    dependence(positivity(b.add("1ZY(+)2Z", true, TWO, true, {R::OddsLinearSystem}, "R^D on Z, R^Y on (Z,Y,R^D): divide the R^D=1 cells by P(R^D=1|Z), then the 1ZY recipe"),
                          {rdZ, pos(RY, "rd=1", "P(R^Y=1 | Z=z, Y=y, R^D=1) > 0 for all z, y")}),
               {kDepYDgivenZ2});

    // R^Y depends on one variable and R^D
    dependence(positivity(b.add("1Z(+)2ZD", true, E, false, {R::OddsLinearSystem}, "R^D on (Z,D), R^Y on (Z,R^D): response odds by R^D level, then the odds system"),
                          {rdZD, pos(RY, "", "P(R^Y=1 | Z=z, R^D=r) > 0 for all z, r")}),
               {kDepYDgivenZ});
    dependence(positivity(b.add("1D(+)2ZD", true, E, false, {R::OddsLinearSystem}, "R^D on (Z,D), R^Y on (D,R^D): response odds by R^D level, then the odds system"),
                          {rdZD, pos(RY, "", "P(R^Y=1 | D=d, R^D=r) > 0 for all d, r")}),
               {"dep(D, Z)", kDepYDgivenZ});
    dependence(positivity(b.add("1Y(+)2ZD", true, E, true, {R::OddsLinearSystem}, "R^D on (Z,D), R^Y on (Y,R^D): response odds by R^D level, then the odds system"),
                          {rdZD, pos(RY, "", "P(R^Y=1 | Y=y, R^D=r) > 0 for all y, r")}),
               {"dep(Y, (Z,D) | R^D=1)", "dep(Y, Z | R^D=0)", kDepYDgivenZ});
    dependence(positivity(b.add("1Z(+)2ZU", true, ONE, false, {R::MixtureSolve}, "R^D on (Z,U), R^Y on (Z,R^D): response odds by R^D level, then the never-taker mixture"),
                          {rdZU, pos(RY, "", "P(R^Y=1 | Z=z, R^D=r) > 0 for all z, r")}),
               {kMixture});
    dependence(positivity(b.add("1U(+)2ZU", true, ONE, false, {R::OddsLinearSystem, R::StratumSubtraction},
                                "R^D on (Z,U), R^Y on (U,R^D): response odds by R^D level, then the never-taker mixture"),
                          {pos(RD, "z=1,u=n", "P(R^D=1 | Z=1, U=n) > 0"), pos(RD, "u=c", "P(R^D=1 | Z=z, U=c) > 0 for z=0,1"),
                           pos(RY, "u=c,rd=1", "P(R^Y=1 | U=c, R^D=1) > 0")}),
               {"dep(R^Y, U | R^D=1)"});
    dependence(positivity(b.add("1D(+)2ZU", true, ONE, false, {R::OddsLinearSystem, R::MixtureSolve}, "R^D on (Z,U), R^Y on (D,R^D): response odds by R^D level, then the never-taker mixture"),
                          {rdZU, pos(RY, "rd=1", "P(R^Y=1 | D=d, R^D=1) > 0 for d=0,1"),
                           pos(RY, "d=0,rd=0", "P(R^Y=1 | D=0, R^D=0) > 0")}),
               {"dep(Y, U | Z=1)"});
    dependence(positivity(b.add("1Y(+)2ZU", true, ONE, true, {R::OddsLinearSystem, R::MixtureSolve}, "R^D on (Z,U), R^Y on (Y,R^D): response odds by R^D level, then the never-taker mixture"),
                          {rdZU, pos(RY, "", "P(R^Y=1 | Y=y, R^D=r) > 0 for all y, r")}),
               {"dep(Y, (Z,D) | R^D=1)", "dep(Y, Z | R^D=0)", kMixture});

    // not identifiable
    auto no = [&](std::string id, std::string fixture, std::string anchor) -> CatalogEntry& {
        auto& e = b.add(std::move(id), false, Sidedness::Either, false, {}, std::move(anchor));
        e.spec.jointRecoverable = JointVerdict::No;
        e.spec.jointNotStated = false;
        e.fixtureId = std::move(fixture);
        return e;
    };
    no("1ZUDY", "", "saturated outcome mechanism; no recipe").fromTheorem = false;
    no("1ZU", "S3.1.3", "R^Y on (Z,U): two laws with equal observables, different CACE");
    no("1ZDY", "S3.1.4", "too many arrows into the response indicator: two laws with equal observables, different CACE");
    no("1UDY", "S3.1.5", "too many arrows into the response indicator: two laws with equal observables, different CACE");
    no("2ZUDY", "", "saturated treatment mechanism; no recipe").fromTheorem = false;
    no("2ZDY", "S3.2.2", "too many arrows into the response indicator: two laws with equal observables, different CACE");
    no("2UDY", "S3.2.3", "too many arrows into the response indicator: two laws with equal observables, different CACE");
    no("1ZD(+)2ZD", "S3.3.1", "R^Y depends on R^D and R^D on (Z,D): two laws with equal observables, different CACE");
    no("1UD(+)2ZD", "S3.3.2", "R^Y depends on R^D and R^D on (Z,D): two laws with equal observables, different CACE");
    no("1UY(+)2ZD", "S3.3.3", "R^Y depends on R^D and R^D on (Z,D): two laws with equal observables, different CACE");
    no("1DY(+)2ZD", "S3.3.4", "R^Y depends on R^D and R^D on (Z,D): two laws with equal observables, different CACE");
    no("1ZY(+)2ZD", "S3.3.5", "R^Y depends on R^D and R^D on (Z,D): two laws with equal observables, different CACE");
    no("1U(+)2ZD", "S3.3.6", "R^D on (Z,D), R^Y on (U,R^D): two-sided counterexample; no recipe is provided");
    no("1DY+2ZU", "", "outcome part needs two-sided noncompliance, treatment part needs one-sided");
    no("1ZY+2ZU", "", "outcome part needs two-sided noncompliance, treatment part needs one-sided");
    return b.rows;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> rows = build();
    return rows;
}

const CatalogEntry& lookup(std::string_view id) {
    static const std::map<std::string, const CatalogEntry*, std::less<>> index = [] {
        std::map<std::string, const CatalogEntry*, std::less<>> m;
        for (const auto& e : catalog()) m[e.spec.id] = &e;
        return m;
    }();
    std::string key;
    try {
        key = normalize_label(id);
    } catch (const Error&) {
        throw Error(ErrorKind::UnknownMechanism, "unknown mechanism '" + std::string(id) + "'");
    }
    auto it = index.find(key);
    if (it == index.end()) throw Error(ErrorKind::UnknownMechanism, "unknown mechanism '" + std::string(id) + "'");
    return *it->second;
}

JointVerdict joint_recoverability(std::string_view id) {
    const auto& e = lookup(id);
    if (!e.spec.identifiable) throw Error(ErrorKind::NotIdentifiable, "mechanism " + e.spec.id + " is not identifiable");
    return e.spec.jointRecoverable;
}

}  // namespace ivmnar
