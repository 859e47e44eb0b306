#include "ivmnar/errors.hpp"

namespace ivmnar {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnknownMechanism: return "UnknownMechanism";
        case ErrorKind::MechanismNotIdentifiable: return "MechanismNotIdentifiable";
        case ErrorKind::RegimeMismatch: return "RegimeMismatch";
        case ErrorKind::SidednessMismatch: return "SidednessMismatch";
        case ErrorKind::PositivityViolated: return "PositivityViolated";
        case ErrorKind::DependenceViolated: return "DependenceViolated";
        case ErrorKind::InconsistentObservables: return "InconsistentObservables";
        case ErrorKind::ZeroFirstStage: return "ZeroFirstStage";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::NegativeOdds: return "NegativeOdds";
        case ErrorKind::NegativeStratumMass: return "NegativeStratumMass";
        case ErrorKind::ValidationFailed: return "ValidationFailed";
        case ErrorKind::NotIdentifiable: return "NotIdentifiable";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::MissingInstrument: return "MissingInstrument";
        case ErrorKind::UnknownOutcomeValue: return "UnknownOutcomeValue";
        case ErrorKind::EmptyArm: return "EmptyArm";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Error";
}

}  // namespace ivmnar
