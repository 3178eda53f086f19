#include "quditsim/noise.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kernel.h"
#include "quditsim/error.h"

namespace quditsim {

namespace {

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix pauli(int d, int j, int l) {
    return make_x_shift(j, d).matrix() * make_z_power(l, d).matrix();
}

void require_probability(double p, const char *what) {
    if (!(p >= 0 && p <= 1)) {
        fail(ErrorKind::kInvalidProbability, std::string(what) + " must lie in [0, 1]");
    }
}

}  // namespace

KrausChannel::KrausChannel(int dim, int arity, std::vector<Matrix> operators, DrawMode mode,
                           std::vector<double> probabilities)
    : dim_(dim), arity_(arity), operators_(std::move(operators)), mode_(mode),
      probabilities_(std::move(probabilities)) {
    if (mode_ == DrawMode::kStateIndependent && probabilities_.size() != operators_.size()) {
        fail(ErrorKind::kInvalidProbability, "state-independent channel needs one probability per operator");
    }
}

double KrausChannel::completeness_error() const {
    auto n = static_cast<Eigen::Index>(detail::ipow(dim_, arity_));
    Matrix acc = Matrix::Zero(n, n);
    for (const auto &k : operators_) {
        acc += k.adjoint() * k;
    }
    return (acc - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

std::size_t KrausChannel::sample(Rng &rng) const {
    if (mode_ != DrawMode::kStateIndependent) {
        fail(ErrorKind::kInvalidProbability, "state-dependent channel has no fixed draw probabilities");
    }
    double u = uniform01(rng);
    for (std::size_t i = 0; i < probabilities_.size(); ++i) {
        if (u < probabilities_[i]) {
            return i;
        }
        u -= probabilities_[i];
    }
    return 0;
}

std::size_t KrausChannel::apply_state_dependent(StateVector &s, int qudit, Rng &rng) const {
    if (arity_ != 1 || dim_ != s.dim()) {
        fail(ErrorKind::kDimensionMismatch, "reference draw handles single-qudit channels of matching dimension");
    }
    std::vector<StateVector> branches;
    std::vector<double> weights;
    for (const auto &k : operators_) {
        StateVector branch = s;
        // Kraus operators are not unitary, so they bypass GateMatrix.
        detail::CompiledGate g;
        g.dim = dim_;
        g.fixed = {{qudit, 0}};
        g.offsets.resize(dim_);
        for (int m = 0; m < dim_; ++m) {
            g.offsets[m] = m * detail::ipow(dim_, s.width() - 1 - qudit);
        }
        g.dense.resize(dim_ * dim_);
        for (int r = 0; r < dim_; ++r) {
            for (int c = 0; c < dim_; ++c) {
                g.dense[r * dim_ + c] = k(r, c);
            }
        }
        detail::apply_compiled(g, branch.data(), s.width());
        weights.push_back(branch.norm_squared());
        branches.push_back(std::move(branch));
    }
    double total = 0;
    for (double w : weights) {
        total += w;
    }
    double u = uniform01(rng) * total;
    std::size_t pick = weights.size() - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) {
            pick = i;
            break;
        }
        u -= weights[i];
    }
    s = std::move(branches[pick]);
    s.normalize();
    return pick;
}

KrausChannel depolarizing_kraus(int d, int arity, double p) {
    if (d < 2 || arity < 1 || arity > 2) {
        fail(ErrorKind::kInvalidDimension, "depolarizing channel needs d >= 2 and arity 1 or 2");
    }
    std::size_t terms = detail::ipow(d, 2 * arity);
    double nontrivial = static_cast<double>(terms - 1) * p;
    if (p < 0 || !(nontrivial < 1)) {
        fail(ErrorKind::kProbabilityOverflow, "(d^{2k} - 1) p must be below 1");
    }
    std::vector<Matrix> ops;
    std::vector<double> probs;
    for (std::size_t e = 0; e < terms; ++e) {
        Matrix op = Matrix::Identity(1, 1);
        std::size_t rest = e;
        std::vector<std::pair<int, int>> factors(arity);
        for (int i = arity - 1; i >= 0; --i) {
            auto digit = static_cast<int>(rest % (d * d));
            rest /= d * d;
            factors[i] = {digit / d, digit % d};
        }
        for (const auto &[j, l] : factors) {
            op = kron(op, pauli(d, j, l));
        }
        double w = e == 0 ? 1 - nontrivial : p;
        ops.push_back(std::sqrt(w) * op);
        probs.push_back(w);
    }
    return KrausChannel(d, arity, std::move(ops), DrawMode::kStateIndependent, std::move(probs));
}

KrausChannel amplitude_damping_kraus(int d, double lambda1, double lambda2) {
    if (d != 2 && d != 3) {
        fail(ErrorKind::kInvalidDimension, "amplitude damping is defined for d = 2 and d = 3");
    }
    require_probability(lambda1, "lambda1");
    require_probability(lambda2, "lambda2");
    double lambdas[3] = {0, lambda1, lambda2};
    std::vector<Matrix> ops;
    Matrix k0 = Matrix::Zero(d, d);
    for (int m = 0; m < d; ++m) {
        k0(m, m) = std::sqrt(1 - lambdas[m]);
    }
    ops.push_back(k0);
    for (int m = 1; m < d; ++m) {
        Matrix k = Matrix::Zero(d, d);
        k(0, m) = std::sqrt(lambdas[m]);
        ops.push_back(k);
    }
    return KrausChannel(d, 1, std::move(ops), DrawMode::kStateDependent);
}

IdleLambdas idle_lambdas(double dt_seconds, double t1_seconds) {
    if (!(dt_seconds > 0) || !(t1_seconds > 0) || std::isinf(t1_seconds)) {
        return {};
    }
    return {-std::expm1(-dt_seconds / t1_seconds), -std::expm1(-2 * dt_seconds / t1_seconds)};
}

double NoiseModel::channel_probability(int dim, int arity) const {
    double p = arity == 1 ? p1 : p2;
    if (budget == ErrorBudget::kPerGate) {
        p /= static_cast<double>(detail::ipow(dim, 2 * arity) - 1);
    }
    return p;
}

void NoiseModel::validate(int dim) const {
    require_probability(p1, "p1");
    require_probability(p2, "p2");
    for (int k = 1; k <= 2; ++k) {
        double total = static_cast<double>(detail::ipow(dim, 2 * k) - 1) * channel_probability(dim, k);
        if (!(total < 1)) {
            fail(ErrorKind::kProbabilityOverflow, "noise model '" + name + "' has total " + std::to_string(k) +
                                                      "-qudit error probability >= 1 at d=" + std::to_string(dim));
        }
    }
    if (idle_enabled && (!(dt_single_seconds > 0) || !(dt_two_seconds > 0))) {
        fail(ErrorKind::kInvalidProbability, "idle errors need positive Moment durations");
    }
}

namespace {

NoiseModel superconducting(std::string name, double total1, double total2, double t1) {
    NoiseModel m;
    m.name = std::move(name);
    m.p1 = total1 / 3;
    m.p2 = total2 / 15;
    m.t1_seconds = t1;
    m.dt_single_seconds = 100e-9;
    m.dt_two_seconds = 300e-9;
    m.idle_enabled = true;
    return m;
}

NoiseModel trapped_ion(std::string name, double p1, double p2) {
    NoiseModel m;
    m.name = std::move(name);
    m.p1 = p1;
    m.p2 = p2;
    m.dt_single_seconds = 1e-6;
    m.dt_two_seconds = 200e-6;
    m.idle_enabled = false;
    m.budget = ErrorBudget::kPerGate;
    return m;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"SC",       "SC+T1",       "SC+GATES",       "SC+T1+GATES", "IBM_CURRENT",
            "TI_QUBIT", "BARE_QUTRIT", "DRESSED_QUTRIT", "NONE"};
}

NoiseModel preset(std::string_view name) {
    if (name == "SC") {
        return superconducting("SC", 1e-4, 1e-3, 1e-3);
    }
    if (name == "SC+T1") {
        return superconducting("SC+T1", 1e-4, 1e-3, 10e-3);
    }
    if (name == "SC+GATES") {
        return superconducting("SC+GATES", 1e-5, 1e-4, 1e-3);
    }
    if (name == "SC+T1+GATES") {
        return superconducting("SC+T1+GATES", 1e-5, 1e-4, 10e-3);
    }
    if (name == "IBM_CURRENT") {
        return superconducting("IBM_CURRENT", 1e-3, 1e-2, 0.1e-3);
    }
    if (name == "TI_QUBIT") {
        return trapped_ion("TI_QUBIT", 6.4e-4, 1.3e-4);
    }
    if (name == "BARE_QUTRIT") {
        return trapped_ion("BARE_QUTRIT", 2.2e-4, 4.3e-4);
    }
    if (name == "DRESSED_QUTRIT") {
        return trapped_ion("DRESSED_QUTRIT", 1.5e-4, 3.1e-4);
    }
    if (name == "NONE") {
        return NoiseModel{};
    }
    fail(ErrorKind::kUnknownPreset, "unknown noise preset '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return "";
    }
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string &value, const std::string &key) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used != value.size() || value.empty()) {
        fail(ErrorKind::kParseError, "bad number for '" + key + "': '" + value + "'");
    }
    return v;
}

bool to_bool(const std::string &value, const std::string &key) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    fail(ErrorKind::kParseError, "bad boolean for '" + key + "': '" + value + "'");
}

}  // namespace

NoiseModel parse_noise_model(std::string_view text) {
    NoiseModel m;
    m.name = "custom";
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            fail(ErrorKind::kParseError, "line " + std::to_string(line_no) + ": expected key=value");
        }
        std::string key = trim(std::string_view(stripped).substr(0, eq));
        std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key == "name") {
            m.name = value;
        } else if (key == "p1") {
            m.p1 = to_double(value, key);
        } else if (key == "p2") {
            m.p2 = to_double(value, key);
        } else if (key == "t1_seconds") {
            if (value == "none" || value == "inf") {
                m.t1_seconds.reset();
            } else {
                m.t1_seconds = to_double(value, key);
            }
        } else if (key == "dt_single_seconds") {
            m.dt_single_seconds = to_double(value, key);
        } else if (key == "dt_two_seconds") {
            m.dt_two_seconds = to_double(value, key);
        } else if (key == "idle_enabled") {
            m.idle_enabled = to_bool(value, key);
        } else if (key == "budget") {
            if (value == "per_channel") {
                m.budget = ErrorBudget::kPerChannel;
            } else if (value == "per_gate") {
                m.budget = ErrorBudget::kPerGate;
            } else {
                fail(ErrorKind::kParseError, "budget must be per_channel or per_gate");
            }
        } else {
            fail(ErrorKind::kParseError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return m;
}

NoiseModel load_noise_model(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::kUnknownPreset, "cannot open noise model file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_noise_model(buf.str());
}

}  // namespace quditsim
