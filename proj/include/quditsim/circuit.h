#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "quditsim/gates.h"

namespace quditsim {

class Circuit {
   public:
    Circuit(int dim, int width);

    int dim() const { return dim_; }
    int width() const { return width_; }
    const std::vector<GateInstance> &gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    /// Throws on an operand index >= width or a dimension mismatch.
    void append(GateInstance gate);
    void append(const Circuit &other);

    /// Copy of this circuit with the gate at `index` removed.
    Circuit without_gate(std::size_t index) const;

    bool operator==(const Circuit &other) const = default;

   private:
    int dim_;
    int width_;
    std::vector<GateInstance> gates_;
};

struct Moment {
    std::vector<GateInstance> gates;
    bool has_two_qudit = false;
};

struct CircuitMetrics {
    int depth = 0;
    int single_qudit_count = 0;
    int two_qudit_count = 0;
    int width = 0;
};

/// True when every gate acts on at most two qudits in total.
bool is_lowered(const Circuit &c);

std::vector<Moment> schedule_asap(const Circuit &c);
/// Throws lowering-required unless `is_lowered(c)`.
CircuitMetrics metrics(const Circuit &c);

Circuit compose(const Circuit &a, const Circuit &b);
Circuit inverse(const Circuit &c);

/// Line format: a `CIRCUIT d=<d> width=<n>` header followed by
/// `GATE <name> d=<d> targets=<i,..> controls=<i:level,..>` lines.
std::string to_text(const Circuit &c);
/// Accepts the output of `to_text`. The header is optional; without it the
/// width is one past the largest operand index. Blank lines and `#` comments
/// are skipped.
Circuit parse_circuit(std::string_view text);

}  // namespace quditsim
