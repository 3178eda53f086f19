#include "quditsim/error.h"

namespace quditsim {

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kInvalidLevel:
            return "invalid-level";
        case ErrorKind::kInvalidDimension:
            return "invalid-dimension";
        case ErrorKind::kNotUnitary:
            return "not-unitary";
        case ErrorKind::kDuplicateOperand:
            return "duplicate-operand";
        case ErrorKind::kDimensionMismatch:
            return "dimension-mismatch";
        case ErrorKind::kLoweringRequired:
            return "lowering-required";
        case ErrorKind::kNonClassicalGate:
            return "non-classical-gate";
        case ErrorKind::kTooLarge:
            return "too-large";
        case ErrorKind::kProbabilityOverflow:
            return "probability-overflow";
        case ErrorKind::kInvalidProbability:
            return "invalid-probability";
        case ErrorKind::kUnknownPreset:
            return "unknown-preset";
        case ErrorKind::kNotLowered:
            return "not-lowered";
        case ErrorKind::kUnnormalizedInput:
            return "unnormalized-input";
        case ErrorKind::kInvalidActivation:
            return "invalid-activation";
        case ErrorKind::kUnsupportedGate:
            return "unsupported-gate";
        case ErrorKind::kVerificationFailure:
            return "verification-failure";
        case ErrorKind::kParseError:
            return "parse-error";
    }
    return "unknown";
}

QuditError::QuditError(ErrorKind kind, const std::string &message)
    : std::invalid_argument(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {
}

void fail(ErrorKind kind, const std::string &message) {
    throw QuditError(kind, message);
}

}  // namespace quditsim
