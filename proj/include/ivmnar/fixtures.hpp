#pragma once

#include "ivmnar/io.hpp"
#include "ivmnar/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ivmnar {

// Two exact parameterizations with identical observables and different CACEs.
struct CounterexampleFixture {
    std::string id;         // "S3.1.1-1DY"
    std::string mechanism;  // canonical label
    std::string note;
    ObservableDistribution<Rational> observables;
    StructuralParams<Rational> paramsA, paramsB;
    Rational caceA, caceB;
};

CounterexampleFixture fixture_from_json(const json& j);
json fixture_to_json(const CounterexampleFixture& f);

// The fourteen checked-in fixtures, ordered by id.
const std::vector<CounterexampleFixture>& builtin_fixtures();
const CounterexampleFixture& builtin_fixture(std::string_view idOrPrefix);

struct VerificationReport {
    std::string fixtureId;
    std::string mechanism;
    bool forwardA = false;   // forward(paramsA) == observables, cell for cell
    bool forwardB = false;
    bool caceMatch = false;  // true_cace(paramsA/B) == caceA/B
    bool distinct = false;   // caceA != caceB
    bool refused = false;    // identify raised MechanismNotIdentifiable or SidednessMismatch
    std::string refusal;     // the raised error (or the returned value when not refused)
    std::vector<std::string> details;
    bool all_pass() const { return forwardA && forwardB && caceMatch && distinct && refused; }
};

VerificationReport verify_fixture(const CounterexampleFixture& f);
json report_to_json(const VerificationReport& r);

struct Alternative {
    StructuralParams<double> params;
    double cace = 0;
    double residual = 0;  // squared distance between forward(params) and the target cells
};

struct SearchOptions {
    double residualTol = 1e-10;
    double caceGap = 1e-3;
    std::size_t maxRestarts = 10000;
};

// Random-restart least squares over parameters of the mechanism. Returns a fit whose CACE
// differs from `reference` (when given) or else from an earlier fit by more than caceGap.
// budget counts refinement iterations over all restarts.
std::optional<Alternative> search_alternative(const ObservableDistribution<double>& obs, std::string_view mech,
                                              std::uint64_t seed, std::size_t budget,
                                              std::optional<double> reference = std::nullopt,
                                              const SearchOptions& opt = {});

}  // namespace ivmnar
