#include "quditsim/constructions.h"

#include <array>
#include <memory>
#include <span>

#include "quditsim/error.h"

namespace quditsim {

namespace {

constexpr int kQutrit = 3;

struct Elementary {
    std::shared_ptr<const GateMatrix> plus = std::make_shared<const GateMatrix>(make_x_shift(+1, kQutrit));
    std::shared_ptr<const GateMatrix> minus = std::make_shared<const GateMatrix>(make_x_shift(-1, kQutrit));
    std::array<std::shared_ptr<const GateMatrix>, 3> swaps = {
        std::make_shared<const GateMatrix>(make_x_perm(0, 1, kQutrit)),
        std::make_shared<const GateMatrix>(make_x_perm(0, 2, kQutrit)),
        std::make_shared<const GateMatrix>(make_x_perm(1, 2, kQutrit)),
    };

    const std::shared_ptr<const GateMatrix> &swap(int i, int j) const {
        if (i > j) {
            std::swap(i, j);
        }
        return swaps[i == 0 ? j - 1 : 2];
    }
};

const Elementary &elementary() {
    static const Elementary e;
    return e;
}

struct Node {
    int qudit;
    Level level;
};

// Appends the compute half of the tree over controls[lo, hi) and returns the
// qudit/level pair that is active iff every control in the range is.
Node build_tree(std::span<const int> controls, int lo, int hi, Level first_activation,
                std::vector<GateInstance> &out) {
    int m = hi - lo;
    if (m == 1) {
        return {controls[lo], lo == 0 ? first_activation : 1};
    }
    int root = lo + m / 2;
    Node left = build_tree(controls, lo, root, first_activation, out);
    std::vector<ControlSpec> ctrl{{left.qudit, left.level}};
    if (root + 1 < hi) {
        Node right = build_tree(controls, root + 1, hi, first_activation, out);
        ctrl.push_back({right.qudit, right.level});
    }
    out.push_back(controlled(elementary().plus, {controls[root]}, std::move(ctrl)));
    return {controls[root], 2};
}

std::vector<std::uint32_t> level_map(const GateMatrix &g) {
    return g.classical_action()->image;
}

bool is_unit_permutation(const GateMatrix &g) {
    const auto &a = g.classical_action();
    if (!a) {
        return false;
    }
    for (const auto &p : a->phase) {
        if (std::abs(p - Complex(1, 0)) > 1e-12) {
            return false;
        }
    }
    return true;
}

}  // namespace

Circuit toffoli_qutrit() {
    const auto &e = elementary();
    Circuit c(kQutrit, 3);
    c.append(controlled(e.plus, {1}, {{0, 1}}));
    c.append(controlled(e.swap(0, 1), {2}, {{1, 2}}));
    c.append(controlled(e.minus, {1}, {{0, 1}}));
    return c;
}

void append_multi_controlled(Circuit &c, const std::vector<int> &controls, Level first_activation, int target,
                             const GateMatrix &gate) {
    if (controls.empty()) {
        fail(ErrorKind::kInvalidDimension, "multi-controlled gate needs at least one control");
    }
    if (first_activation < 0 || first_activation >= kQutrit) {
        fail(ErrorKind::kInvalidActivation, "activation level must be 0, 1 or 2, got " +
                                                std::to_string(first_activation));
    }
    if (c.dim() != kQutrit || gate.dim() != kQutrit || gate.arity() != 1) {
        fail(ErrorKind::kDimensionMismatch, "tree construction needs a single-qutrit target gate on qutrits");
    }
    std::vector<GateInstance> compute;
    Node root = build_tree(controls, 0, static_cast<int>(controls.size()), first_activation, compute);
    for (const auto &g : compute) {
        c.append(g);
    }
    c.append(controlled(gate, {target}, {{root.qudit, root.level}}));
    for (auto it = compute.rbegin(); it != compute.rend(); ++it) {
        c.append(GateInstance(elementary().minus, it->targets(), it->controls()));
    }
}

Circuit generalized_toffoli(int n_controls, const GateMatrix &target, Level root_activation) {
    if (root_activation < 0 || root_activation >= kQutrit) {
        fail(ErrorKind::kInvalidActivation, "root activation must be 0, 1 or 2, got " +
                                                std::to_string(root_activation));
    }
    if (n_controls < 1) {
        fail(ErrorKind::kInvalidDimension, "need at least one control");
    }
    Circuit c(kQutrit, n_controls + 1);
    std::vector<int> controls(n_controls);
    for (int i = 0; i < n_controls; ++i) {
        controls[i] = i;
    }
    append_multi_controlled(c, controls, root_activation, n_controls, target);
    return c;
}

std::vector<GateInstance> lower_two_controlled(const GateInstance &g) {
    if (g.controls().size() != 2 || g.base().arity() != 1) {
        fail(ErrorKind::kUnsupportedGate, "lowering needs exactly two controls and one target");
    }
    if (g.dim() != kQutrit || !is_unit_permutation(g.base())) {
        fail(ErrorKind::kUnsupportedGate, "cannot lower doubly-controlled '" + g.base().name() + "'");
    }
    const auto &e = elementary();
    auto perm = level_map(g.base());
    int t = g.targets()[0];
    ControlSpec c1 = g.controls()[0];
    ControlSpec c2 = g.controls()[1];
    int fixed_points = 0;
    for (int m = 0; m < kQutrit; ++m) {
        fixed_points += perm[m] == static_cast<std::uint32_t>(m);
    }

    std::vector<GateInstance> out;
    if (fixed_points == 0) {
        // Two transpositions a, b with (ba)^2 equal to the cycle. A single
        // active control contributes a.a or b.b, both identity.
        static constexpr std::array<std::array<int, 2>, 3> pairs = {{{0, 1}, {0, 2}, {1, 2}}};
        for (const auto &pa : pairs) {
            for (const auto &pb : pairs) {
                if (pa == pb) {
                    continue;
                }
                auto a = level_map(*e.swap(pa[0], pa[1]));
                auto b = level_map(*e.swap(pb[0], pb[1]));
                bool match = true;
                for (std::uint32_t m = 0; m < kQutrit; ++m) {
                    match &= b[a[b[a[m]]]] == perm[m];
                }
                if (!match) {
                    continue;
                }
                const auto &ga = e.swap(pa[0], pa[1]);
                const auto &gb = e.swap(pb[0], pb[1]);
                out.push_back(controlled(ga, {t}, {c1}));
                out.push_back(controlled(gb, {t}, {c2}));
                out.push_back(controlled(ga, {t}, {c1}));
                out.push_back(controlled(gb, {t}, {c2}));
                return out;
            }
        }
    }
    if (fixed_points == 1) {
        // The target fires once under c1, and once more for each of the two
        // frames in which c2 sits at level m; relabelling c2 with the swap of
        // its two inactive levels makes those frames cancel exactly when c2 is
        // at its activation level.
        std::array<int, 2> others{};
        int k = 0;
        for (int m = 0; m < kQutrit; ++m) {
            if (m != c2.level) {
                others[k++] = m;
            }
        }
        const auto &tau = g.base_ptr();
        const auto &relabel = e.swap(others[0], others[1]);
        ControlSpec c2_frame{c2.qudit, others[0]};
        out.push_back(controlled(tau, {t}, {c1}));
        out.push_back(controlled(tau, {t}, {c2_frame}));
        out.push_back(controlled(relabel, {c2.qudit}, {c1}));
        out.push_back(controlled(tau, {t}, {c2_frame}));
        out.push_back(controlled(relabel, {c2.qudit}, {c1}));
        return out;
    }
    fail(ErrorKind::kUnsupportedGate, "cannot lower doubly-controlled '" + g.base().name() + "'");
}

Circuit lower_circuit(const Circuit &c) {
    Circuit out(c.dim(), c.width());
    for (const auto &g : c.gates()) {
        if (g.operand_count() <= 2) {
            out.append(g);
            continue;
        }
        for (auto &lowered : lower_two_controlled(g)) {
            out.append(std::move(lowered));
        }
    }
    return out;
}

namespace {

// Adds 1 to the bits `bits` (least significant first) iff `generate` is |2>.
// Leaves every bit a qubit value and `generate` untouched.
void controlled_increment(Circuit &c, int generate, std::span<const int> bits) {
    const auto &e = elementary();
    std::size_t m = bits.size();
    if (m == 0) {
        return;
    }
    if (m == 1) {
        c.append(controlled(e.swap(0, 1), {bits[0]}, {{generate, 2}}));
        return;
    }
    std::size_t k = m / 2;
    auto low = bits.subspan(0, k);
    int pivot = bits[k];
    auto high = bits.subspan(k + 1);
    std::vector<int> carry_controls{generate};
    carry_controls.insert(carry_controls.end(), low.begin(), low.end());

    // Raise the pivot when the low half carries into it. A pivot at |1> then
    // sits at |2> and generates for the high half. The low half is still
    // unmodified here.
    append_multi_controlled(c, carry_controls, 2, pivot, *e.plus);
    controlled_increment(c, pivot, high);
    controlled_increment(c, generate, low);
    // The carry into the pivot happened iff generate is |2> and the low half
    // wrapped to all zeros: fold the pivot back into a bit.
    for (int q : low) {
        c.append(controlled(e.swap(0, 1), {q}));
    }
    append_multi_controlled(c, carry_controls, 2, pivot, *e.swap(0, 2));
    for (int q : low) {
        c.append(controlled(e.swap(0, 1), {q}));
    }
}

}  // namespace

Circuit incrementer(int n) {
    if (n < 1) {
        fail(ErrorKind::kInvalidDimension, "incrementer needs at least one qutrit");
    }
    const auto &e = elementary();
    Circuit c(kQutrit, n);
    std::vector<int> bits(n);
    for (int j = 0; j < n; ++j) {
        bits[j] = n - 1 - j;
    }
    int lsb = bits[0];
    // The least significant bit moves to |2> exactly when it carries.
    c.append(controlled(e.plus, {lsb}));
    controlled_increment(c, lsb, std::span<const int>(bits).subspan(1));
    c.append(controlled(e.swap(0, 2), {lsb}));
    return c;
}

}  // namespace quditsim
