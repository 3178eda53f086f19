#pragma once

#include <vector>

#include "quditsim/circuit.h"
#include "quditsim/gates.h"

namespace quditsim {

/// Three two-qutrit gates: |1>-controlled X+1 (q0 -> q1), |2>-controlled X01
/// (q1 -> q2), |1>-controlled X-1 (q0 -> q1).
Circuit toffoli_qutrit();

/// Applies `target` to qudit n_controls iff control 0 is at `root_activation`
/// and controls 1..n-1 are |1>. Controls other than qudit 0 must hold qubit
/// values; all of them are restored.
///
/// Each control range is split at its middle qudit, which is raised to |2>
/// when both halves are fully activated. Leaves are |1>-activated, except
/// qudit 0 which is always a leaf and uses `root_activation`.
Circuit generalized_toffoli(int n_controls, const GateMatrix &target, Level root_activation = 1);

/// Appends the tree construction above on arbitrary qudits of `c`.
void append_multi_controlled(Circuit &c, const std::vector<int> &controls, Level first_activation, int target,
                             const GateMatrix &gate);

/// Exact decomposition of a doubly-controlled qutrit permutation gate into
/// singly-controlled gates. Supports the 3-cycles X+1/X-1 (4 gates) and the
/// transpositions X01/X02/X12 (5 gates).
std::vector<GateInstance> lower_two_controlled(const GateInstance &g);

/// Replaces every doubly-controlled gate by `lower_two_controlled`.
Circuit lower_circuit(const Circuit &c);

/// |x> -> |x + 1 mod 2^n> on n qutrits, qudit n-1 holding the least
/// significant bit.
Circuit incrementer(int n);

}  // namespace quditsim
