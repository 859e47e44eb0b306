#pragma once

#include <stdexcept>
#include <string>

namespace ivmnar {

enum class ErrorKind {
    UnknownMechanism,
    MechanismNotIdentifiable,
    RegimeMismatch,
    SidednessMismatch,
    PositivityViolated,
    DependenceViolated,
    InconsistentObservables,
    ZeroFirstStage,
    SingularSystem,
    NegativeOdds,
    NegativeStratumMass,
    ValidationFailed,
    NotIdentifiable,
    MalformedRow,
    MissingInstrument,
    UnknownOutcomeValue,
    EmptyArm,
    ParseError,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail, double magnitude = 0.0)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
          kind_(kind), detail_(detail), magnitude_(magnitude) {}

    ErrorKind kind() const { return kind_; }
    const std::string& detail() const { return detail_; }
    // determinant / contrast for DependenceViolated, otherwise 0
    double magnitude() const { return magnitude_; }

private:
    ErrorKind kind_;
    std::string detail_;
    double magnitude_;
};

}  // namespace ivmnar
