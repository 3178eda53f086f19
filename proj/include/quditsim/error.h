#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quditsim {

enum class ErrorKind {
    kInvalidLevel,
    kInvalidDimension,
    kNotUnitary,
    kDuplicateOperand,
    kDimensionMismatch,
    kLoweringRequired,
    kNonClassicalGate,
    kTooLarge,
    kProbabilityOverflow,
    kInvalidProbability,
    kUnknownPreset,
    kNotLowered,
    kUnnormalizedInput,
    kInvalidActivation,
    kUnsupportedGate,
    kVerificationFailure,
    kParseError,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every error raised by the library carries a kind so callers and tests can
/// dispatch on it without parsing the message.
class QuditError : public std::invalid_argument {
   public:
    QuditError(ErrorKind kind, const std::string &message);
    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string &message);

}  // namespace quditsim
