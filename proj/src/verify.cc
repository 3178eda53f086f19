#include "quditsim/verify.h"

#include "quditsim/constructions.h"
#include "quditsim/error.h"

namespace quditsim {

CircuitKind parse_circuit_kind(std::string_view name) {
    if (name == "toffoli") {
        return CircuitKind::kToffoli;
    }
    if (name == "gen-toffoli") {
        return CircuitKind::kGenToffoli;
    }
    if (name == "incrementer") {
        return CircuitKind::kIncrementer;
    }
    fail(ErrorKind::kParseError, "unknown circuit '" + std::string(name) + "'");
}

std::string_view circuit_kind_name(CircuitKind kind) {
    switch (kind) {
        case CircuitKind::kToffoli:
            return "toffoli";
        case CircuitKind::kGenToffoli:
            return "gen-toffoli";
        case CircuitKind::kIncrementer:
            return "incrementer";
    }
    return "unknown";
}

Circuit build_circuit(CircuitKind kind, int n) {
    switch (kind) {
        case CircuitKind::kToffoli:
            if (n != 2) {
                fail(ErrorKind::kInvalidDimension, "the qutrit Toffoli has exactly 2 controls");
            }
            return toffoli_qutrit();
        case CircuitKind::kGenToffoli:
            return generalized_toffoli(n, make_x_perm(0, 1, 3));
        case CircuitKind::kIncrementer:
            return incrementer(n);
    }
    fail(ErrorKind::kParseError, "unknown circuit kind");
}

BasisLabel expected_output(CircuitKind kind, int n, const BasisLabel &input) {
    BasisLabel out = input;
    if (kind == CircuitKind::kIncrementer) {
        for (int q = n - 1; q >= 0; --q) {
            out[q] ^= 1;
            if (out[q] == 1) {
                break;
            }
        }
        return out;
    }
    bool all = true;
    for (int q = 0; q < n; ++q) {
        all &= input[q] == 1;
    }
    if (all) {
        out[n] ^= 1;
    }
    return out;
}

VerifyResult verify_truth_table(const Circuit &c, const std::function<BasisLabel(const BasisLabel &)> &oracle) {
    VerifyResult result;
    int w = c.width();
    if (w > 62) {
        fail(ErrorKind::kTooLarge, "exhaustive verification is limited to 62 qudits");
    }
    BasisLabel label(w);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << w); ++bits) {
        for (int q = 0; q < w; ++q) {
            label[q] = static_cast<Level>((bits >> (w - 1 - q)) & 1);
        }
        BasisLabel got = classical_propagate(c, label);
        BasisLabel want = oracle(label);
        ++result.inputs_checked;
        if (got != want) {
            result.counterexample = label;
            result.got = std::move(got);
            result.expected = std::move(want);
            return result;
        }
    }
    return result;
}

std::string format_label(const BasisLabel &label) {
    std::string out = "|";
    for (std::size_t i = 0; i < label.size(); ++i) {
        out += (i ? "," : "") + std::to_string(label[i]);
    }
    return out + ">";
}

}  // namespace quditsim
