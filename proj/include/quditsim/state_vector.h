#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "quditsim/circuit.h"
#include "quditsim/gates.h"
#include "quditsim/rng.h"

namespace quditsim {

/// One level per qudit, qudit 0 first.
using BasisLabel = std::vector<Level>;

/// d^width, throwing too-large if it does not fit in memory addressing.
std::size_t state_size(int dim, int width);

/// Dense amplitudes over `width` qudits. Qudit 0 is the most significant digit
/// of the basis index.
class StateVector {
   public:
    /// The all-zero basis state.
    StateVector(int dim, int width);
    static StateVector basis(int dim, const BasisLabel &label);

    int dim() const { return dim_; }
    int width() const { return width_; }
    std::size_t size() const { return amps_.size(); }
    std::span<Complex> amplitudes() { return amps_; }
    std::span<const Complex> amplitudes() const { return amps_; }
    Complex *data() { return amps_.data(); }
    const Complex *data() const { return amps_.data(); }
    Complex &operator[](std::size_t i) { return amps_[i]; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }

    std::size_t index_of(const BasisLabel &label) const;
    BasisLabel label_of(std::size_t index) const;

    double norm_squared() const;
    void normalize();
    void set_zero();

   private:
    int dim_;
    int width_;
    std::vector<Complex> amps_;
};

/// In-place controlled-gate application touching each amplitude once.
void apply_gate(StateVector &s, const GateInstance &g);
void apply_circuit(StateVector &s, const Circuit &c);

/// Folds classical actions over the circuit. Throws non-classical-gate.
BasisLabel classical_propagate(const Circuit &c, BasisLabel label);

Complex inner_product(const StateVector &a, const StateVector &b);
/// |<a|b>|^2.
double fidelity(const StateVector &a, const StateVector &b);

/// Normalized complex Gaussian amplitudes on the labels whose digits are all
/// 0 or 1; every other amplitude is exactly zero.
StateVector random_qubit_subspace_state(int width, int dim, std::uint64_t seed);
StateVector random_qubit_subspace_state(int width, int dim, Rng &rng);
/// Same distribution, written into an existing buffer.
void fill_random_qubit_subspace_state(StateVector &s, Rng &rng);
/// The 2^width nonzero amplitudes of such a state, in the order of
/// `qubit_subspace_indices`. Consumes the same draws as the functions above.
std::vector<Complex> random_qubit_subspace_amplitudes(int width, Rng &rng);

/// Indices of all labels whose digits are 0 or 1, in increasing order.
std::vector<std::size_t> qubit_subspace_indices(int width, int dim);

/// Limit on d^width for `full_unitary`.
constexpr std::size_t kFullUnitaryMaxDim = 729;

/// Matrix of the whole circuit, one column per basis state. Throws too-large
/// beyond `kFullUnitaryMaxDim`.
Matrix full_unitary(const Circuit &c);

}  // namespace quditsim
