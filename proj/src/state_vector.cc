#include "quditsim/state_vector.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "kernel.h"
#include "quditsim/error.h"

namespace quditsim {

std::size_t state_size(int dim, int width) {
    if (dim < 2 || width < 0) {
        fail(ErrorKind::kInvalidDimension, "bad register shape");
    }
    std::size_t n = 1;
    for (int i = 0; i < width; ++i) {
        if (n > std::numeric_limits<std::size_t>::max() / 16 / static_cast<std::size_t>(dim)) {
            fail(ErrorKind::kTooLarge, "register of " + std::to_string(width) + " qudits is too large");
        }
        n *= static_cast<std::size_t>(dim);
    }
    return n;
}

StateVector::StateVector(int dim, int width) : dim_(dim), width_(width), amps_(state_size(dim, width)) {
    amps_[0] = 1;
}

StateVector StateVector::basis(int dim, const BasisLabel &label) {
    StateVector s(dim, static_cast<int>(label.size()));
    s.amps_[0] = 0;
    s.amps_[s.index_of(label)] = 1;
    return s;
}

std::size_t StateVector::index_of(const BasisLabel &label) const {
    if (static_cast<int>(label.size()) != width_) {
        fail(ErrorKind::kDimensionMismatch, "label length differs from register width");
    }
    std::size_t idx = 0;
    for (Level digit : label) {
        if (digit < 0 || digit >= dim_) {
            fail(ErrorKind::kInvalidLevel, "label digit " + std::to_string(digit) + " outside dimension");
        }
        idx = idx * dim_ + digit;
    }
    return idx;
}

BasisLabel StateVector::label_of(std::size_t index) const {
    BasisLabel out(width_);
    for (int q = width_ - 1; q >= 0; --q) {
        out[q] = static_cast<Level>(index % dim_);
        index /= dim_;
    }
    return out;
}

double StateVector::norm_squared() const {
    double acc = 0;
    for (const auto &a : amps_) {
        acc += a.real() * a.real() + a.imag() * a.imag();
    }
    return acc;
}

void StateVector::normalize() {
    double n = std::sqrt(norm_squared());
    if (n == 0) {
        fail(ErrorKind::kUnnormalizedInput, "cannot normalize the zero vector");
    }
    double inv = 1 / n;
    for (auto &a : amps_) {
        a *= inv;
    }
}

void StateVector::set_zero() {
    std::fill(amps_.begin(), amps_.end(), Complex(0, 0));
}

void apply_gate(StateVector &s, const GateInstance &g) {
    if (g.dim() != s.dim()) {
        fail(ErrorKind::kDimensionMismatch, "gate dimension " + std::to_string(g.dim()) + " vs state dimension " +
                                                std::to_string(s.dim()));
    }
    for (int q : g.operands()) {
        if (q >= s.width()) {
            fail(ErrorKind::kDimensionMismatch, "operand " + std::to_string(q) + " outside register");
        }
    }
    detail::apply_compiled(detail::compile_gate(g, s.width()), s.data(), s.width());
}

void apply_circuit(StateVector &s, const Circuit &c) {
    if (c.dim() != s.dim() || c.width() != s.width()) {
        fail(ErrorKind::kDimensionMismatch, "circuit and state shapes differ");
    }
    for (const auto &g : c.gates()) {
        detail::apply_compiled(detail::compile_gate(g, s.width()), s.data(), s.width());
    }
}

BasisLabel classical_propagate(const Circuit &c, BasisLabel label) {
    if (static_cast<int>(label.size()) != c.width()) {
        fail(ErrorKind::kDimensionMismatch, "label length differs from circuit width");
    }
    for (const auto &g : c.gates()) {
        if (!g.classical_action()) {
            fail(ErrorKind::kNonClassicalGate, "gate '" + g.base().name() + "' has no classical action");
        }
    }
    for (const auto &g : c.gates()) {
        g.apply_classical(label);
    }
    return label;
}

Complex inner_product(const StateVector &a, const StateVector &b) {
    if (a.dim() != b.dim() || a.width() != b.width()) {
        fail(ErrorKind::kDimensionMismatch, "state shapes differ");
    }
    Complex acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

double fidelity(const StateVector &a, const StateVector &b) {
    Complex ip = inner_product(a, b);
    return ip.real() * ip.real() + ip.imag() * ip.imag();
}

std::vector<std::size_t> qubit_subspace_indices(int width, int dim) {
    state_size(dim, width);
    std::size_t count = std::size_t{1} << width;
    std::vector<std::size_t> out(count);
    for (std::size_t bits = 0; bits < count; ++bits) {
        std::size_t idx = 0;
        for (int q = 0; q < width; ++q) {
            idx = idx * dim + ((bits >> (width - 1 - q)) & 1);
        }
        out[bits] = idx;
    }
    return out;
}

std::vector<Complex> random_qubit_subspace_amplitudes(int width, Rng &rng) {
    if (width < 1 || width > 62) {
        fail(ErrorKind::kInvalidDimension, "random state needs 1 to 62 qudits");
    }
    std::vector<Complex> out(std::size_t{1} << width);
    double norm = 0;
    for (auto &z : out) {
        // Box-Muller keeps the stream identical across standard libraries.
        double u1 = 1.0 - uniform01(rng);
        double u2 = uniform01(rng);
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2 * std::numbers::pi * u2;
        z = Complex(r * std::cos(theta), r * std::sin(theta));
        norm += z.real() * z.real() + z.imag() * z.imag();
    }
    double inv = 1 / std::sqrt(norm);
    for (auto &z : out) {
        z *= inv;
    }
    return out;
}

void fill_random_qubit_subspace_state(StateVector &s, Rng &rng) {
    auto amps = random_qubit_subspace_amplitudes(s.width(), rng);
    s.set_zero();
    auto support = qubit_subspace_indices(s.width(), s.dim());
    for (std::size_t i = 0; i < support.size(); ++i) {
        s[support[i]] = amps[i];
    }
}

StateVector random_qubit_subspace_state(int width, int dim, Rng &rng) {
    if (width < 1) {
        fail(ErrorKind::kInvalidDimension, "random state needs at least one qudit");
    }
    StateVector s(dim, width);
    fill_random_qubit_subspace_state(s, rng);
    return s;
}

StateVector random_qubit_subspace_state(int width, int dim, std::uint64_t seed) {
    Rng rng(seed);
    return random_qubit_subspace_state(width, dim, rng);
}

Matrix full_unitary(const Circuit &c) {
    std::size_t n = state_size(c.dim(), c.width());
    if (n > kFullUnitaryMaxDim) {
        fail(ErrorKind::kTooLarge, "full unitary of dimension " + std::to_string(n) + " exceeds " +
                                       std::to_string(kFullUnitaryMaxDim));
    }
    std::vector<detail::CompiledGate> compiled;
    for (const auto &g : c.gates()) {
        compiled.push_back(detail::compile_gate(g, c.width()));
    }
    Matrix out(n, n);
    StateVector col(c.dim(), c.width());
    for (std::size_t j = 0; j < n; ++j) {
        col.set_zero();
        col[j] = 1;
        for (const auto &g : compiled) {
            detail::apply_compiled(g, col.data(), c.width());
        }
        for (std::size_t i = 0; i < n; ++i) {
            out(i, j) = col[i];
        }
    }
    return out;
}

}  // namespace quditsim
