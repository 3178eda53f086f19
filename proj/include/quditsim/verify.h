#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "quditsim/circuit.h"
#include "quditsim/state_vector.h"

namespace quditsim {

enum class CircuitKind { kToffoli, kGenToffoli, kIncrementer };

/// "toffoli", "gen-toffoli" or "incrementer".
CircuitKind parse_circuit_kind(std::string_view name);
std::string_view circuit_kind_name(CircuitKind kind);

/// Unlowered construction. `n` is the control count for the Toffoli family
/// (fixed at 2 for "toffoli") and the register width for the incrementer.
Circuit build_circuit(CircuitKind kind, int n);

/// Mathematical specification of the construction on a qubit-valued label.
BasisLabel expected_output(CircuitKind kind, int n, const BasisLabel &input);

struct VerifyResult {
    std::size_t inputs_checked = 0;
    std::optional<BasisLabel> counterexample;
    BasisLabel got;
    BasisLabel expected;
    bool ok() const { return !counterexample.has_value(); }
};

/// Runs `c` classically on every label with digits in {0, 1} and compares it
/// with `oracle`. Stops at the first mismatch.
VerifyResult verify_truth_table(const Circuit &c, const std::function<BasisLabel(const BasisLabel &)> &oracle);

std::string format_label(const BasisLabel &label);

}  // namespace quditsim
