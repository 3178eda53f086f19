#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace quditsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// A basis level of a single qudit, 0 <= level < d.
using Level = int;

constexpr double kUnitarityTolerance = 1e-9;

/// Action of a generalized-permutation matrix on basis labels: column j has its
/// single nonzero entry `phase[j]` in row `image[j]`.
struct ClassicalAction {
    std::vector<std::uint32_t> image;
    std::vector<Complex> phase;
};

class GateMatrix {
   public:
    /// Throws if the matrix is not square of size dim^arity or not unitary.
    GateMatrix(std::string name, int dim, int arity, Matrix entries);

    const std::string &name() const { return name_; }
    int dim() const { return dim_; }
    int arity() const { return arity_; }
    std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix &matrix() const { return entries_; }
    const std::optional<ClassicalAction> &classical_action() const { return classical_; }
    bool is_diagonal() const { return diagonal_; }

    GateMatrix adjoint() const;

    bool operator==(const GateMatrix &other) const;

   private:
    std::string name_;
    int dim_;
    int arity_;
    Matrix entries_;
    std::optional<ClassicalAction> classical_;
    bool diagonal_ = false;
};

/// Swaps |i> and |j>.
GateMatrix make_x_perm(Level i, Level j, int d);
/// |m> -> |m + s mod d>.
GateMatrix make_x_shift(int s, int d);
/// diag(exp(2 pi i m / d)).
GateMatrix make_z(int d);
/// make_z(d) raised to the k-th power.
GateMatrix make_z_power(int k, int d);
GateMatrix make_identity(int d);
/// Rebuilds a named elementary gate ("X01", "X+1", "X-1", "Z", "Z^2", "I").
GateMatrix gate_from_name(std::string_view name, int d);

struct ControlSpec {
    int qudit;
    Level level;
    bool operator==(const ControlSpec &other) const = default;
};

class GateInstance {
   public:
    GateInstance(std::shared_ptr<const GateMatrix> base, std::vector<int> targets, std::vector<ControlSpec> controls);

    const GateMatrix &base() const { return *base_; }
    const std::shared_ptr<const GateMatrix> &base_ptr() const { return base_; }
    const std::vector<int> &targets() const { return targets_; }
    const std::vector<ControlSpec> &controls() const { return controls_; }
    int dim() const { return base_->dim(); }
    const std::optional<ClassicalAction> &classical_action() const { return base_->classical_action(); }

    /// Controls first, then targets.
    std::vector<int> operands() const;
    int operand_count() const { return static_cast<int>(targets_.size() + controls_.size()); }
    bool touches(int qudit) const;

    /// Applies the classical action to a full basis label in place. Requires a
    /// classical action.
    void apply_classical(std::vector<Level> &digits) const;

    GateInstance inverse() const;

    bool operator==(const GateInstance &other) const;

   private:
    std::shared_ptr<const GateMatrix> base_;
    std::vector<int> targets_;
    std::vector<ControlSpec> controls_;
};

GateInstance controlled(const GateMatrix &base, std::vector<int> targets, std::vector<ControlSpec> controls = {});
GateInstance controlled(std::shared_ptr<const GateMatrix> base, std::vector<int> targets,
                        std::vector<ControlSpec> controls = {});

/// Largest elementwise deviation between `a` and `b` after removing the best
/// global phase.
double phase_aligned_distance(const Matrix &a, const Matrix &b);

}  // namespace quditsim
