#include <doctest.h>

#include "ivmnar/catalog.hpp"
#include "ivmnar/errors.hpp"
#include "ivmnar/fixtures.hpp"

#include <set>

using namespace ivmnar;

TEST_CASE("catalog counts") {
    int yes = 0, no = 0;
    for (const auto& e : catalog()) (e.spec.identifiable ? yes : no)++;
    CHECK(yes == 39);  // includes MCAR-Y and MCAR-D
    CHECK(no == 15);
}

TEST_CASE("catalog ids are canonical and unique") {
    std::set<std::string> seen;
    for (const auto& e : catalog()) {
        CHECK(seen.insert(e.spec.id).second);
        if (e.spec.id.rfind("MCAR", 0) != 0) CHECK(normalize_label(e.spec.id) == e.spec.id);
        CHECK(&lookup(e.spec.id) == &e);
        CHECK_FALSE(e.proofAnchor.empty());
    }
}

TEST_CASE("every single-indicator parent set is classified") {
    // R^Y parents: subsets of {Z,U,D,Y}; treatment-missing: R^D parents likewise
    const Var vars[] = {Var::Z, Var::U, Var::D, Var::Y};
    int found = 0;
    for (unsigned bits = 1; bits < 16; ++bits) {
        std::string letters;
        for (int i = 0; i < 4; ++i)
            if (bits & (1u << i)) letters += "ZUDY"[i];
        for (const char* side : {"1", "2"}) {
            std::string id = side + letters;
            try {
                const auto& e = lookup(id);
                ++found;
                VarSet v = *side == '1' ? e.spec.ryParents : e.spec.rdParents;
                for (int i = 0; i < 4; ++i) CHECK(v.has(vars[i]) == bool(bits & (1u << i)));
            } catch (const Error& err) {
                CHECK(err.kind() == ErrorKind::UnknownMechanism);
            }
        }
    }
    CHECK(found > 0);
}

TEST_CASE("labels: alternative spellings normalize") {
    CHECK(normalize_label("1ZD+2ZD") == "1ZD+2ZD");
    CHECK(normalize_label("1U\xE2\x8A\x95" "2ZD") == "1U(+)2ZD");
    CHECK_THROWS_AS(lookup("9QQ"), Error);
}

TEST_CASE("unidentifiable entries with a fixture point at an existing one") {
    for (const auto& e : catalog()) {
        if (e.fixtureId.empty()) continue;
        CHECK_NOTHROW(builtin_fixture(e.fixtureId));
    }
}

TEST_CASE("joint verdicts") {
    CHECK(joint_recoverability("1ZD") == JointVerdict::Yes);
    CHECK(joint_recoverability("1UY") == JointVerdict::No);
    CHECK(joint_recoverability("2UY") == JointVerdict::UnderExtraConditions);
}
