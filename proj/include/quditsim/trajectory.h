#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "quditsim/circuit.h"
#include "quditsim/noise.h"
#include "quditsim/rng.h"
#include "quditsim/state_vector.h"

namespace quditsim {

struct TrajectoryStats {
    std::size_t trials = 0;
    double mean_fidelity = 0;
    /// Sample standard deviation over sqrt(trials); 0 for a single trial.
    double standard_error = 0;
    /// Per-trial fidelities in trial order, filled when requested.
    std::vector<double> fidelities;
};

/// One amplitude-damping draw on every qudit of `s`, each with probability
/// |K_i psi|^2 given the draws before it, followed by renormalization.
/// Returns the Kraus index drawn per qudit.
std::vector<int> apply_idle_layer(StateVector &s, const IdleLambdas &lambdas, Rng &rng);

/// kAuto keeps the state as its nonzero entries when every gate is a
/// (phased) permutation and the input occupies at most half the register;
/// the full amplitude array is used otherwise. kDense always uses the array.
enum class Engine { kAuto, kDense };

/// Noisy execution of a lowered circuit. Immutable after construction and
/// shareable across threads.
class TrajectorySimulator {
   public:
    using Observer = std::function<void(std::size_t moment, const StateVector &state)>;

    /// Throws not-lowered, or the noise model's validation errors.
    TrajectorySimulator(const Circuit &c, const NoiseModel &nm, Engine engine = Engine::kAuto);
    ~TrajectorySimulator();
    TrajectorySimulator(const TrajectorySimulator &) = delete;
    TrajectorySimulator &operator=(const TrajectorySimulator &) = delete;

    /// Fidelity of one noisy run against the noiseless output of `init`.
    /// Throws unnormalized-input.
    double run(const StateVector &init, Rng &rng, const Observer &observer = {}) const;

    /// Fidelities of trials 0..trials-1 in trial order. Trial t draws a fresh
    /// random qubit-subspace input and all of its noise from substream(seed, t),
    /// so the result does not depend on `parallelism`.
    std::vector<double> run_trials(std::uint64_t seed, std::size_t trials, int parallelism = 1) const;

    std::size_t moment_count() const;
    /// True when the noiseless reference is computed by classical propagation.
    bool classical_reference() const;

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

double run_trajectory(const Circuit &c, const NoiseModel &nm, const StateVector &init, Rng &rng);

/// Trials are spread over `parallelism` threads; the result depends only on
/// (circuit, noise model, trials, seed).
TrajectoryStats run_experiment(const Circuit &c, const NoiseModel &nm, std::size_t trials, std::uint64_t seed,
                               int parallelism = 1, bool keep_fidelities = false);

}  // namespace quditsim
