#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quditsim/gates.h"
#include "quditsim/rng.h"
#include "quditsim/state_vector.h"

namespace quditsim {

enum class DrawMode { kStateIndependent, kStateDependent };

class KrausChannel {
   public:
    /// `probabilities` is required for state-independent channels and ignored
    /// otherwise.
    KrausChannel(int dim, int arity, std::vector<Matrix> operators, DrawMode mode,
                 std::vector<double> probabilities = {});

    int dim() const { return dim_; }
    int arity() const { return arity_; }
    const std::vector<Matrix> &operators() const { return operators_; }
    DrawMode draw_mode() const { return mode_; }
    const std::vector<double> &probabilities() const { return probabilities_; }

    /// max |sum_i K_i^dag K_i - I|.
    double completeness_error() const;

    /// Index of a state-independent draw.
    std::size_t sample(Rng &rng) const;

    /// Draws K_i with probability |K_i psi|^2 on one qudit of `s`, applies it
    /// and renormalizes. Returns i. Reference path for single-qudit channels.
    std::size_t apply_state_dependent(StateVector &s, int qudit, Rng &rng) const;

   private:
    int dim_;
    int arity_;
    std::vector<Matrix> operators_;
    DrawMode mode_;
    std::vector<double> probabilities_;
};

/// Identity with weight 1 - (d^{2k} - 1) p, and each nontrivial tensor product
/// of X_{+1}^j Z^l with weight p. Operator index e encodes, for operand i
/// (most significant first), the pair (j, l) as the base-d^2 digit j*d + l.
KrausChannel depolarizing_kraus(int d, int arity, double p);

/// K_0 = diag(1, sqrt(1 - lambda1), sqrt(1 - lambda2)), K_m = sqrt(lambda_m)|0><m|.
KrausChannel amplitude_damping_kraus(int d, double lambda1, double lambda2 = 0);

struct IdleLambdas {
    double lambda1 = 0;
    double lambda2 = 0;
};

/// lambda_m = 1 - exp(-m dt / t1). A non-positive or infinite t1 means no decay.
IdleLambdas idle_lambdas(double dt_seconds, double t1_seconds);

/// How p1/p2 are read. kPerChannel: the value is the weight of each nontrivial
/// depolarizing term. kPerGate: the value is the total error probability of a
/// gate, shared evenly among the d^{2k} - 1 terms.
enum class ErrorBudget { kPerChannel, kPerGate };

struct NoiseModel {
    std::string name = "NONE";
    double p1 = 0;
    double p2 = 0;
    std::optional<double> t1_seconds;
    double dt_single_seconds = 0;
    double dt_two_seconds = 0;
    bool idle_enabled = false;
    ErrorBudget budget = ErrorBudget::kPerChannel;

    /// Weight of one nontrivial depolarizing term for a k-qudit gate.
    double channel_probability(int dim, int arity) const;
    /// Throws probability-overflow or invalid-probability.
    void validate(int dim) const;
};

/// SC, SC+T1, SC+GATES, SC+T1+GATES, IBM_CURRENT, TI_QUBIT, BARE_QUTRIT,
/// DRESSED_QUTRIT, NONE.
NoiseModel preset(std::string_view name);
std::vector<std::string> preset_names();

/// key=value lines: name, p1, p2, t1_seconds, dt_single_seconds,
/// dt_two_seconds, idle_enabled, budget (per_channel | per_gate).
NoiseModel parse_noise_model(std::string_view text);
NoiseModel load_noise_model(const std::string &path);

}  // namespace quditsim
