#include "quditsim/gates.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

#include "quditsim/error.h"

namespace quditsim {

namespace {

void require_dim(int d) {
    if (d < 2) {
        fail(ErrorKind::kInvalidDimension, "qudit dimension must be at least 2, got " + std::to_string(d));
    }
}

std::size_t ipow(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= static_cast<std::size_t>(base);
    }
    return r;
}

std::optional<ClassicalAction> detect_classical(const Matrix &m) {
    constexpr double tol = 1e-12;
    ClassicalAction action;
    auto n = m.rows();
    action.image.resize(n);
    action.phase.resize(n);
    for (Eigen::Index col = 0; col < n; ++col) {
        int hits = 0;
        for (Eigen::Index row = 0; row < n; ++row) {
            if (std::abs(m(row, col)) > tol) {
                ++hits;
                action.image[col] = static_cast<std::uint32_t>(row);
                action.phase[col] = m(row, col);
            }
        }
        if (hits != 1) {
            return std::nullopt;
        }
    }
    return action;
}

bool detect_diagonal(const Matrix &m) {
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
        for (Eigen::Index row = 0; row < m.rows(); ++row) {
            if (row != col && std::abs(m(row, col)) > 1e-12) {
                return false;
            }
        }
    }
    return true;
}

std::string perm_name(int i, int j) {
    if (i > j) {
        std::swap(i, j);
    }
    if (j < 10) {
        return "X" + std::to_string(i) + std::to_string(j);
    }
    return "X(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::string z_name(int k) {
    return k == 1 ? std::string("Z") : "Z^" + std::to_string(k);
}

int parse_int(std::string_view text, std::string_view whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        fail(ErrorKind::kParseError, "bad gate name '" + std::string(whole) + "'");
    }
    return value;
}

std::string adjoint_name(const std::string &name, int d) {
    if (name == "I" || (name.size() >= 2 && name[0] == 'X' && name[1] != '+' && name[1] != '-')) {
        return name;
    }
    if (name.size() >= 2 && name[0] == 'X' && (name[1] == '+' || name[1] == '-')) {
        return std::string("X") + (name[1] == '+' ? '-' : '+') + name.substr(2);
    }
    if (name == "Z") {
        return z_name(d - 1);
    }
    if (name.rfind("Z^", 0) == 0) {
        int k = parse_int(std::string_view(name).substr(2), name);
        int inv = ((d - k) % d + d) % d;
        return inv == 0 ? std::string("I") : z_name(inv);
    }
    constexpr std::string_view dag = "^dag";
    if (name.size() > dag.size() && name.ends_with(dag)) {
        return name.substr(0, name.size() - dag.size());
    }
    return name + std::string(dag);
}

}  // namespace

GateMatrix::GateMatrix(std::string name, int dim, int arity, Matrix entries)
    : name_(std::move(name)), dim_(dim), arity_(arity), entries_(std::move(entries)) {
    require_dim(dim);
    if (arity < 1 || arity > 3) {
        fail(ErrorKind::kInvalidDimension, "gate arity must be 1, 2 or 3, got " + std::to_string(arity));
    }
    auto n = static_cast<Eigen::Index>(ipow(dim, arity));
    if (entries_.rows() != n || entries_.cols() != n) {
        fail(ErrorKind::kDimensionMismatch, "gate '" + name_ + "' matrix must be " + std::to_string(n) + "x" +
                                                std::to_string(n));
    }
    Matrix residual = entries_ * entries_.adjoint() - Matrix::Identity(n, n);
    if (residual.cwiseAbs().maxCoeff() > kUnitarityTolerance) {
        fail(ErrorKind::kNotUnitary, "gate '" + name_ + "' is not unitary");
    }
    classical_ = detect_classical(entries_);
    diagonal_ = detect_diagonal(entries_);
}

GateMatrix GateMatrix::adjoint() const {
    return GateMatrix(adjoint_name(name_, dim_), dim_, arity_, entries_.adjoint());
}

bool GateMatrix::operator==(const GateMatrix &other) const {
    return name_ == other.name_ && dim_ == other.dim_ && arity_ == other.arity_ && entries_ == other.entries_;
}

GateMatrix make_x_perm(Level i, Level j, int d) {
    require_dim(d);
    if (i == j || i < 0 || j < 0 || i >= d || j >= d) {
        fail(ErrorKind::kInvalidLevel, "X_ij needs distinct levels below " + std::to_string(d) + ", got " +
                                           std::to_string(i) + "," + std::to_string(j));
    }
    Matrix m = Matrix::Identity(d, d);
    m(i, i) = 0;
    m(j, j) = 0;
    m(i, j) = 1;
    m(j, i) = 1;
    return GateMatrix(perm_name(i, j), d, 1, std::move(m));
}

GateMatrix make_x_shift(int s, int d) {
    require_dim(d);
    Matrix m = Matrix::Zero(d, d);
    int shift = ((s % d) + d) % d;
    for (int col = 0; col < d; ++col) {
        m((col + shift) % d, col) = 1;
    }
    std::string name = std::string("X") + (s < 0 ? "-" : "+") + std::to_string(std::abs(s));
    return GateMatrix(std::move(name), d, 1, std::move(m));
}

GateMatrix make_z_power(int k, int d) {
    require_dim(d);
    int kk = ((k % d) + d) % d;
    Matrix m = Matrix::Zero(d, d);
    for (int level = 0; level < d; ++level) {
        double angle = 2 * std::numbers::pi * static_cast<double>((level * kk) % d) / d;
        m(level, level) = std::polar(1.0, angle);
    }
    return GateMatrix(kk == 0 ? std::string("I") : z_name(kk), d, 1, std::move(m));
}

GateMatrix make_z(int d) {
    return make_z_power(1, d);
}

GateMatrix make_identity(int d) {
    require_dim(d);
    return GateMatrix("I", d, 1, Matrix::Identity(d, d));
}

GateMatrix gate_from_name(std::string_view name, int d) {
    if (name == "I") {
        return make_identity(d);
    }
    if (name == "Z") {
        return make_z(d);
    }
    if (name.starts_with("Z^")) {
        return make_z_power(parse_int(name.substr(2), name), d);
    }
    if (name.size() >= 3 && name[0] == 'X' && (name[1] == '+' || name[1] == '-')) {
        int s = parse_int(name.substr(2), name);
        return make_x_shift(name[1] == '+' ? s : -s, d);
    }
    if (name.size() == 3 && name[0] == 'X') {
        return make_x_perm(name[1] - '0', name[2] - '0', d);
    }
    if (name.starts_with("X(") && name.ends_with(")")) {
        auto inner = name.substr(2, name.size() - 3);
        auto comma = inner.find(',');
        if (comma != std::string_view::npos) {
            return make_x_perm(parse_int(inner.substr(0, comma), name), parse_int(inner.substr(comma + 1), name), d);
        }
    }
    fail(ErrorKind::kParseError, "unknown gate name '" + std::string(name) + "'");
}

GateInstance::GateInstance(std::shared_ptr<const GateMatrix> base, std::vector<int> targets,
                           std::vector<ControlSpec> controls)
    : base_(std::move(base)), targets_(std::move(targets)), controls_(std::move(controls)) {
    if (static_cast<int>(targets_.size()) != base_->arity()) {
        fail(ErrorKind::kDimensionMismatch, "gate '" + base_->name() + "' needs " + std::to_string(base_->arity()) +
                                                " targets, got " + std::to_string(targets_.size()));
    }
    std::set<int> seen;
    for (int q : operands()) {
        if (q < 0) {
            fail(ErrorKind::kInvalidLevel, "negative qudit index");
        }
        if (!seen.insert(q).second) {
            fail(ErrorKind::kDuplicateOperand, "qudit " + std::to_string(q) + " used twice in gate '" +
                                                   base_->name() + "'");
        }
    }
    for (const auto &c : controls_) {
        if (c.level < 0 || c.level >= base_->dim()) {
            fail(ErrorKind::kInvalidLevel, "control level " + std::to_string(c.level) + " outside dimension " +
                                               std::to_string(base_->dim()));
        }
    }
}

std::vector<int> GateInstance::operands() const {
    std::vector<int> out;
    out.reserve(targets_.size() + controls_.size());
    for (const auto &c : controls_) {
        out.push_back(c.qudit);
    }
    out.insert(out.end(), targets_.begin(), targets_.end());
    return out;
}

bool GateInstance::touches(int qudit) const {
    if (std::find(targets_.begin(), targets_.end(), qudit) != targets_.end()) {
        return true;
    }
    return std::any_of(controls_.begin(), controls_.end(), [&](const ControlSpec &c) { return c.qudit == qudit; });
}

void GateInstance::apply_classical(std::vector<Level> &digits) const {
    const auto &action = classical_action();
    if (!action) {
        fail(ErrorKind::kNonClassicalGate, "gate '" + base_->name() + "' has no classical action");
    }
    for (const auto &c : controls_) {
        if (digits[c.qudit] != c.level) {
            return;
        }
    }
    int d = dim();
    std::uint32_t local = 0;
    for (int t : targets_) {
        local = local * d + static_cast<std::uint32_t>(digits[t]);
    }
    std::uint32_t out = action->image[local];
    for (auto it = targets_.rbegin(); it != targets_.rend(); ++it) {
        digits[*it] = static_cast<Level>(out % d);
        out /= d;
    }
}

GateInstance GateInstance::inverse() const {
    return GateInstance(std::make_shared<const GateMatrix>(base_->adjoint()), targets_, controls_);
}

bool GateInstance::operator==(const GateInstance &other) const {
    return targets_ == other.targets_ && controls_ == other.controls_ &&
           (base_ == other.base_ || *base_ == *other.base_);
}

GateInstance controlled(const GateMatrix &base, std::vector<int> targets, std::vector<ControlSpec> controls) {
    return GateInstance(std::make_shared<const GateMatrix>(base), std::move(targets), std::move(controls));
}

GateInstance controlled(std::shared_ptr<const GateMatrix> base, std::vector<int> targets,
                        std::vector<ControlSpec> controls) {
    return GateInstance(std::move(base), std::move(targets), std::move(controls));
}

double phase_aligned_distance(const Matrix &a, const Matrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        fail(ErrorKind::kDimensionMismatch, "matrix shapes differ");
    }
    Complex overlap = (b.conjugate().cwiseProduct(a)).sum();
    Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1, 0);
    return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace quditsim
