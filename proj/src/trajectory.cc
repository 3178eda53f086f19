#include "quditsim/trajectory.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "kernel.h"
#include "quditsim/error.h"

namespace quditsim {

namespace {

// Samples the per-qudit damping draws of one idle layer in a single sweep.
//
// With qudits visited in index order, the probability that qudits s..q-1 draw
// K_0 and qudit q draws K_m is lambda_m * sum_x |psi_x|^2 [x_q = m]
// prod_{s<=r<q} (1 - lambda_{x_r}). Big-endian prefixes are contiguous
// blocks, so these sums come from block norms of the state weighted by a
// per-prefix damping factor; the factor depends only on the last q - s digits
// of the prefix and is tabulated once.
class IdleSampler {
   public:
    IdleSampler(int dim, int width, const IdleLambdas &lambdas) : dim_(dim), width_(width) {
        if (dim != 2 && dim != 3) {
            fail(ErrorKind::kInvalidDimension, "idle errors are defined for d = 2 and d = 3");
        }
        double lam[3] = {0, lambdas.lambda1, lambdas.lambda2};
        for (int m = 0; m < dim; ++m) {
            lambda_[m] = lam[m];
            keep_[m] = 1 - lam[m];
            sqrt_keep_[m] = std::sqrt(keep_[m]);
            sqrt_lambda_[m] = std::sqrt(lam[m]);
        }
        weight_.resize(std::max(width, 1));
        sqrt_weight_.resize(weight_.size());
        weight_[0] = {1.0};
        sqrt_weight_[0] = {1.0};
        for (std::size_t k = 1; k < weight_.size(); ++k) {
            const auto &prev = weight_[k - 1];
            auto &cur = weight_[k];
            cur.resize(prev.size() * dim);
            for (std::size_t u = 0; u < prev.size(); ++u) {
                for (int m = 0; m < dim; ++m) {
                    cur[u * dim + m] = prev[u] * keep_[m];
                }
            }
            sqrt_weight_[k].resize(cur.size());
            for (std::size_t i = 0; i < cur.size(); ++i) {
                sqrt_weight_[k][i] = std::sqrt(cur[i]);
            }
        }
    }

    // `blocks` is scratch space reused between calls.
    void apply(StateVector &s, Rng &rng, std::vector<std::vector<double>> &blocks, std::vector<int> *outcomes) const {
        const int n = width_;
        const std::size_t d = dim_;
        Complex *amps = s.data();
        blocks.resize(n);
        std::vector<double> a(static_cast<std::size_t>(n) * d);
        if (outcomes) {
            outcomes->assign(n, 0);
        }
        int start = 0;
        while (start < n) {
            std::fill(a.begin(), a.end(), 0.0);
            const std::size_t prefixes = detail::ipow(d, n - 1);
            const int k_last = n - 1 - start;
            const auto &w_last = weight_[k_last];
            const std::size_t mod_last = w_last.size();
            auto &b_last = blocks[n - 1];
            b_last.resize(prefixes);
            double total = 0;
            double no_jump = 0;
            double *a_last = a.data() + static_cast<std::size_t>(n - 1) * d;
            for (std::size_t p = 0; p < prefixes; ++p) {
                const Complex *blk = amps + p * d;
                double w = w_last[p % mod_last];
                double sum = 0;
                double kept = 0;
                for (std::size_t m = 0; m < d; ++m) {
                    double b = blk[m].real() * blk[m].real() + blk[m].imag() * blk[m].imag();
                    sum += b;
                    kept += keep_[m] * b;
                    a_last[m] += w * b;
                }
                b_last[p] = sum;
                total += sum;
                no_jump += w * kept;
            }
            for (int level = n - 2; level > start; --level) {
                const auto &child = blocks[level + 1];
                auto &cur = blocks[level];
                cur.resize(detail::ipow(d, level));
                for (std::size_t p = 0; p < cur.size(); ++p) {
                    double sum = 0;
                    for (std::size_t m = 0; m < d; ++m) {
                        sum += child[p * d + m];
                    }
                    cur[p] = sum;
                }
            }
            for (int q = start; q < n - 1; ++q) {
                const auto &w = weight_[q - start];
                const auto &child = blocks[q + 1];
                double *aq = a.data() + static_cast<std::size_t>(q) * d;
                std::size_t count = detail::ipow(d, q);
                for (std::size_t p = 0; p < count; ++p) {
                    double wp = w[p % w.size()];
                    for (std::size_t m = 1; m < d; ++m) {
                        aq[m] += wp * child[p * d + m];
                    }
                }
            }

            double u = uniform01(rng) * total;
            int jump_q = -1;
            int jump_m = 0;
            double jump_p = 0;
            for (int q = start; q < n && jump_q < 0; ++q) {
                for (std::size_t m = 1; m < d; ++m) {
                    double w = lambda_[m] * a[static_cast<std::size_t>(q) * d + m];
                    if (u < w) {
                        jump_q = q;
                        jump_m = static_cast<int>(m);
                        jump_p = w;
                        break;
                    }
                    u -= w;
                }
            }

            if (jump_q < 0) {
                double scale = 1 / std::sqrt(no_jump);
                const auto &sw = sqrt_weight_[k_last];
                for (std::size_t p = 0; p < prefixes; ++p) {
                    double f = sw[p % mod_last] * scale;
                    Complex *blk = amps + p * d;
                    for (std::size_t m = 0; m < d; ++m) {
                        blk[m] *= f * sqrt_keep_[m];
                    }
                }
                return;
            }

            if (outcomes) {
                (*outcomes)[jump_q] = jump_m;
            }
            double scale = sqrt_lambda_[jump_m] / std::sqrt(jump_p);
            const auto &sw = sqrt_weight_[jump_q - start];
            const std::size_t run = detail::ipow(d, n - 1 - jump_q);
            const std::size_t count = detail::ipow(d, jump_q);
            for (std::size_t p = 0; p < count; ++p) {
                double f = sw[p % sw.size()] * scale;
                Complex *base = amps + p * d * run;
                const Complex *src = base + jump_m * run;
                for (std::size_t j = 0; j < run; ++j) {
                    base[j] = f * src[j];
                }
                std::fill(base + run, base + d * run, Complex(0, 0));
            }
            start = jump_q + 1;
        }
    }

   private:
    int dim_;
    int width_;
    double lambda_[3] = {0, 0, 0};
    double keep_[3] = {1, 1, 1};
    double sqrt_keep_[3] = {1, 1, 1};
    double sqrt_lambda_[3] = {0, 0, 0};
    // weight_[k][u] = prod over the k digits of u of (1 - lambda_digit).
    std::vector<std::vector<double>> weight_;
    std::vector<std::vector<double>> sqrt_weight_;
};

struct SparseAmplitude {
    std::size_t index;
    Complex amp;
};

// Basis-state-to-basis-state action of a gate, read off its classical action.
struct ClassicalStep {
    std::vector<ControlSpec> controls;
    std::vector<int> targets;
    std::vector<std::uint32_t> image;
    std::vector<Complex> phase;
    bool unit_phase = true;
};

// A state kept as its nonzero entries. Gates, Pauli errors and damping jumps
// of a classical circuit send basis states to basis states, so the support
// never grows past that of the input.
struct SparseState {
    std::vector<std::uint8_t> digits;  // width digits per entry
    std::vector<std::size_t> index;
    std::vector<Complex> amp;
};

}  // namespace

std::vector<int> apply_idle_layer(StateVector &s, const IdleLambdas &lambdas, Rng &rng) {
    IdleSampler sampler(s.dim(), s.width(), lambdas);
    std::vector<std::vector<double>> blocks;
    std::vector<int> outcomes;
    sampler.apply(s, rng, blocks, &outcomes);
    return outcomes;
}

struct TrajectorySimulator::Impl {
    struct Step {
        detail::CompiledGate gate;
        std::vector<int> operands;
        ClassicalStep classical;
    };
    struct MomentPlan {
        std::vector<Step> steps;
        const IdleSampler *idle = nullptr;
        IdleLambdas lambdas;
    };
    struct Worker {
        StateVector state;
        std::vector<std::vector<double>> blocks;
        std::vector<SparseAmplitude> reference;
        std::vector<int> digits;
        std::unique_ptr<StateVector> dense_reference;
        SparseState sparse;
        std::vector<Complex> input;
    };

    Circuit circuit;
    NoiseModel noise;
    Engine engine;
    int dim;
    int width;
    std::vector<MomentPlan> moments;
    std::unique_ptr<IdleSampler> idle_single;
    std::unique_ptr<IdleSampler> idle_two;
    double p_error[3] = {0, 0, 0};
    std::size_t error_terms[3] = {1, 1, 1};
    bool classical;
    std::vector<std::size_t> strides;
    std::vector<Complex> roots;
    // Qubit-subspace inputs: the noiseless image of support entry i is
    // image_index[i] with phase image_phase[i]; image_order sorts by index.
    std::vector<std::size_t> support;
    std::vector<std::size_t> image_index;
    std::vector<Complex> image_phase;
    std::vector<std::size_t> image_order;

    Impl(const Circuit &c, const NoiseModel &nm, Engine e)
        : circuit(c), noise(nm), engine(e), dim(c.dim()), width(c.width()), classical(true) {
        if (!is_lowered(c)) {
            fail(ErrorKind::kNotLowered, "trajectory simulation needs a circuit of one- and two-qudit gates");
        }
        nm.validate(dim);
        for (int k = 1; k <= 2; ++k) {
            p_error[k] = nm.channel_probability(dim, k);
            error_terms[k] = detail::ipow(dim, 2 * k);
        }
        bool idle = nm.idle_enabled && nm.t1_seconds.has_value();
        IdleLambdas single, two;
        if (idle) {
            single = idle_lambdas(nm.dt_single_seconds, *nm.t1_seconds);
            two = idle_lambdas(nm.dt_two_seconds, *nm.t1_seconds);
            idle_single = std::make_unique<IdleSampler>(dim, width, single);
            idle_two = std::make_unique<IdleSampler>(dim, width, two);
        }
        for (auto &m : schedule_asap(c)) {
            MomentPlan plan;
            for (const auto &g : m.gates) {
                Step step{detail::compile_gate(g, width), g.operands(), {}};
                if (const auto &action = g.classical_action()) {
                    step.classical.controls = g.controls();
                    step.classical.targets = g.targets();
                    step.classical.image = action->image;
                    step.classical.phase = action->phase;
                    for (const auto &p : action->phase) {
                        step.classical.unit_phase &= p == Complex(1, 0);
                    }
                } else {
                    classical = false;
                }
                plan.steps.push_back(std::move(step));
            }
            if (idle) {
                plan.idle = m.has_two_qudit ? idle_two.get() : idle_single.get();
                plan.lambdas = m.has_two_qudit ? two : single;
            }
            moments.push_back(std::move(plan));
        }
        strides.resize(width);
        for (int q = 0; q < width; ++q) {
            strides[q] = detail::ipow(dim, width - 1 - q);
        }
        for (int m = 0; m < dim; ++m) {
            roots.push_back(std::polar(1.0, 2 * std::numbers::pi * m / dim));
        }
        if (classical && width <= 62) {
            std::vector<int> digits;
            support = qubit_subspace_indices(width, dim);
            for (std::size_t idx : support) {
                auto image = propagate(idx, digits);
                image_index.push_back(image.index);
                image_phase.push_back(image.amp);
            }
            image_order.resize(support.size());
            for (std::size_t i = 0; i < support.size(); ++i) {
                image_order[i] = i;
            }
            std::sort(image_order.begin(), image_order.end(),
                      [&](std::size_t a, std::size_t b) { return image_index[a] < image_index[b]; });
        }
    }

    bool use_sparse(std::size_t nonzeros) const {
        return engine == Engine::kAuto && classical && dim <= 3 && 2 * nonzeros <= detail::ipow(dim, width);
    }

    // Index of the depolarizing term drawn for a k-qudit gate; 0 is no error.
    std::size_t draw_gate_error(int k, Rng &rng) const {
        double p = p_error[k];
        if (p <= 0) {
            return 0;
        }
        double u = uniform01(rng);
        std::size_t terms = error_terms[k];
        if (!(u < static_cast<double>(terms - 1) * p)) {
            return 0;
        }
        return 1 + std::min(terms - 2, static_cast<std::size_t>(u / p));
    }

    // Calls fn(operand, shift, phase_power) for each nontrivial factor of term e.
    template <class Fn>
    void for_each_error_factor(const std::vector<int> &operands, std::size_t e, Fn fn) const {
        std::size_t dd = static_cast<std::size_t>(dim) * dim;
        for (int i = static_cast<int>(operands.size()) - 1; i >= 0; --i) {
            auto digit = static_cast<int>(e % dd);
            e /= dd;
            int shift = digit / dim;
            int phase_power = digit % dim;
            if (shift != 0 || phase_power != 0) {
                fn(operands[i], shift, phase_power);
            }
        }
    }

    void apply_gate_error(const Step &step, StateVector &s, Rng &rng) const {
        std::size_t e = draw_gate_error(static_cast<int>(step.operands.size()), rng);
        if (e == 0) {
            return;
        }
        for_each_error_factor(step.operands, e, [&](int q, int shift, int phase_power) {
            std::vector<std::uint32_t> image(dim);
            std::vector<Complex> phase(dim);
            for (int m = 0; m < dim; ++m) {
                image[m] = static_cast<std::uint32_t>((m + shift) % dim);
                phase[m] = roots[(phase_power * m) % dim];
            }
            auto pauli = detail::compile_single_permutation(dim, width, q, std::move(image), std::move(phase));
            detail::apply_compiled(pauli, s.data(), width);
        });
    }

    // Classical image and accumulated phase of basis index `idx`.
    SparseAmplitude propagate(std::size_t idx, std::vector<int> &digits) const {
        digits.resize(width);
        for (int q = width - 1; q >= 0; --q) {
            digits[q] = static_cast<int>(idx % dim);
            idx /= dim;
        }
        Complex phase(1, 0);
        for (const auto &g : circuit.gates()) {
            bool active = true;
            for (const auto &c : g.controls()) {
                active &= digits[c.qudit] == c.level;
            }
            if (!active) {
                continue;
            }
            const auto &action = *g.classical_action();
            std::uint32_t local = 0;
            for (int t : g.targets()) {
                local = local * dim + static_cast<std::uint32_t>(digits[t]);
            }
            std::uint32_t out = action.image[local];
            phase *= action.phase[local];
            for (auto it = g.targets().rbegin(); it != g.targets().rend(); ++it) {
                digits[*it] = static_cast<int>(out % dim);
                out /= dim;
            }
        }
        std::size_t out = 0;
        for (int q = 0; q < width; ++q) {
            out = out * dim + digits[q];
        }
        return {out, phase};
    }

    // ---- dense engine ----

    void build_reference(Worker &w, const std::vector<std::size_t> *input_support) const {
        if (!classical) {
            if (!w.dense_reference) {
                w.dense_reference = std::make_unique<StateVector>(dim, width);
            }
            *w.dense_reference = w.state;
            for (const auto &m : moments) {
                for (const auto &step : m.steps) {
                    detail::apply_compiled(step.gate, w.dense_reference->data(), width);
                }
            }
            return;
        }
        w.reference.clear();
        auto add = [&](std::size_t idx) {
            Complex amp = w.state[idx];
            if (amp == Complex(0, 0)) {
                return;
            }
            auto image = propagate(idx, w.digits);
            w.reference.push_back({image.index, image.amp * amp});
        };
        if (input_support) {
            for (std::size_t idx : *input_support) {
                add(idx);
            }
        } else {
            for (std::size_t idx = 0; idx < w.state.size(); ++idx) {
                add(idx);
            }
        }
    }

    double dense_overlap(const Worker &w) const {
        Complex acc = 0;
        if (classical) {
            for (const auto &e : w.reference) {
                acc += std::conj(e.amp) * w.state[e.index];
            }
        } else {
            acc = inner_product(*w.dense_reference, w.state);
        }
        return acc.real() * acc.real() + acc.imag() * acc.imag();
    }

    // Runs the noisy circuit on w.state, which holds the input.
    double execute_dense(Worker &w, Rng &rng, const std::vector<std::size_t> *input_support,
                         const Observer &observer) const {
        build_reference(w, input_support);
        for (std::size_t mi = 0; mi < moments.size(); ++mi) {
            const auto &m = moments[mi];
            for (const auto &step : m.steps) {
                detail::apply_compiled(step.gate, w.state.data(), width);
                apply_gate_error(step, w.state, rng);
            }
            if (m.idle) {
                m.idle->apply(w.state, rng, w.blocks, nullptr);
            }
            if (observer) {
                observer(mi, w.state);
            }
        }
        return dense_overlap(w);
    }

    // ---- sparse engine ----

    void sparse_load(SparseState &s, const std::vector<SparseAmplitude> &entries) const {
        s.digits.resize(entries.size() * width);
        s.index.resize(entries.size());
        s.amp.resize(entries.size());
        for (std::size_t e = 0; e < entries.size(); ++e) {
            s.index[e] = entries[e].index;
            s.amp[e] = entries[e].amp;
            std::size_t rest = entries[e].index;
            for (int q = width - 1; q >= 0; --q) {
                s.digits[e * width + q] = static_cast<std::uint8_t>(rest % dim);
                rest /= dim;
            }
        }
    }

    void sparse_gate(const ClassicalStep &g, SparseState &s) const {
        const std::size_t n = s.amp.size();
        for (std::size_t e = 0; e < n; ++e) {
            std::uint8_t *dg = s.digits.data() + e * width;
            bool active = true;
            for (const auto &c : g.controls) {
                active &= dg[c.qudit] == c.level;
            }
            if (!active) {
                continue;
            }
            std::uint32_t local = 0;
            for (int t : g.targets) {
                local = local * dim + dg[t];
            }
            std::uint32_t out = g.image[local];
            if (!g.unit_phase) {
                s.amp[e] *= g.phase[local];
            }
            for (auto it = g.targets.rbegin(); it != g.targets.rend(); ++it) {
                auto nd = static_cast<std::uint8_t>(out % dim);
                out /= dim;
                s.index[e] = s.index[e] - dg[*it] * strides[*it] + nd * strides[*it];
                dg[*it] = nd;
            }
        }
    }

    void sparse_gate_error(const Step &step, SparseState &s, Rng &rng) const {
        std::size_t e = draw_gate_error(static_cast<int>(step.operands.size()), rng);
        if (e == 0) {
            return;
        }
        for_each_error_factor(step.operands, e, [&](int q, int shift, int phase_power) {
            for (std::size_t i = 0; i < s.amp.size(); ++i) {
                std::uint8_t &d = s.digits[i * width + q];
                if (phase_power != 0) {
                    s.amp[i] *= roots[(phase_power * d) % dim];
                }
                auto nd = static_cast<std::uint8_t>((d + shift) % dim);
                s.index[i] = s.index[i] - d * strides[q] + nd * strides[q];
                d = nd;
            }
        });
    }

    // One damping draw per qudit in index order, each with probability
    // ||K_m psi||^2 given the draws before it. The state is left unnormalized.
    void sparse_idle(const IdleLambdas &l, SparseState &s, Rng &rng) const {
        const double lam[3] = {0, l.lambda1, l.lambda2};
        const double keep[3] = {1, std::sqrt(1 - l.lambda1), std::sqrt(1 - l.lambda2)};
        for (int q = 0; q < width; ++q) {
            double level[3] = {0, 0, 0};
            const std::size_t n = s.amp.size();
            for (std::size_t e = 0; e < n; ++e) {
                level[s.digits[e * width + q]] += std::norm(s.amp[e]);
            }
            double u = uniform01(rng) * (level[0] + level[1] + level[2]);
            int jump = 0;
            for (int m = 1; m < dim; ++m) {
                double w = lam[m] * level[m];
                if (u < w) {
                    jump = m;
                    break;
                }
                u -= w;
            }
            if (jump == 0) {
                for (std::size_t e = 0; e < n; ++e) {
                    s.amp[e] *= keep[s.digits[e * width + q]];
                }
                continue;
            }
            // K_jump keeps the entries at level `jump` and moves them to |0>;
            // the common factor sqrt(lambda) drops out.
            std::size_t kept = 0;
            for (std::size_t e = 0; e < n; ++e) {
                if (s.digits[e * width + q] != jump) {
                    continue;
                }
                if (kept != e) {
                    std::copy_n(s.digits.data() + e * width, width, s.digits.data() + kept * width);
                    s.index[kept] = s.index[e];
                    s.amp[kept] = s.amp[e];
                }
                s.digits[kept * width + q] = 0;
                s.index[kept] -= jump * strides[q];
                ++kept;
            }
            s.digits.resize(kept * width);
            s.index.resize(kept);
            s.amp.resize(kept);
        }
    }

    void sparse_to_dense(const SparseState &s, StateVector &out) const {
        out.set_zero();
        double norm = 0;
        for (const auto &a : s.amp) {
            norm += std::norm(a);
        }
        double inv = 1 / std::sqrt(norm);
        for (std::size_t e = 0; e < s.amp.size(); ++e) {
            out[s.index[e]] = s.amp[e] * inv;
        }
    }

    // `reference` is the noiseless output sorted by index.
    double sparse_overlap(const SparseState &s, const std::vector<SparseAmplitude> &reference) const {
        Complex acc = 0;
        double norm = 0;
        for (std::size_t e = 0; e < s.amp.size(); ++e) {
            norm += std::norm(s.amp[e]);
            auto it = std::lower_bound(reference.begin(), reference.end(), s.index[e],
                                       [](const SparseAmplitude &r, std::size_t idx) { return r.index < idx; });
            if (it != reference.end() && it->index == s.index[e]) {
                acc += std::conj(it->amp) * s.amp[e];
            }
        }
        return norm > 0 ? std::norm(acc) / norm : 0.0;
    }

    double execute_sparse(Worker &w, Rng &rng, const Observer &observer) const {
        for (std::size_t mi = 0; mi < moments.size(); ++mi) {
            const auto &m = moments[mi];
            for (const auto &step : m.steps) {
                sparse_gate(step.classical, w.sparse);
                sparse_gate_error(step, w.sparse, rng);
            }
            if (m.idle) {
                sparse_idle(m.lambdas, w.sparse, rng);
            }
            if (observer) {
                sparse_to_dense(w.sparse, w.state);
                observer(mi, w.state);
            }
        }
        return sparse_overlap(w.sparse, w.reference);
    }

    // Trial on a fresh random qubit-subspace input drawn from `rng`.
    double random_trial(Worker &w, Rng &rng) const {
        if (!use_sparse(support.size())) {
            fill_random_qubit_subspace_state(w.state, rng);
            return execute_dense(w, rng, &support, {});
        }
        w.input = random_qubit_subspace_amplitudes(width, rng);
        w.reference.resize(support.size());
        for (std::size_t k = 0; k < image_order.size(); ++k) {
            std::size_t i = image_order[k];
            w.reference[k] = {image_index[i], image_phase[i] * w.input[i]};
        }
        std::vector<SparseAmplitude> entries(support.size());
        for (std::size_t i = 0; i < support.size(); ++i) {
            entries[i] = {support[i], w.input[i]};
        }
        sparse_load(w.sparse, entries);
        return execute_sparse(w, rng, {});
    }
};

TrajectorySimulator::TrajectorySimulator(const Circuit &c, const NoiseModel &nm, Engine engine)
    : impl_(std::make_unique<Impl>(c, nm, engine)) {
}

TrajectorySimulator::~TrajectorySimulator() = default;

std::size_t TrajectorySimulator::moment_count() const {
    return impl_->moments.size();
}

bool TrajectorySimulator::classical_reference() const {
    return impl_->classical;
}

double TrajectorySimulator::run(const StateVector &init, Rng &rng, const Observer &observer) const {
    if (init.dim() != impl_->dim || init.width() != impl_->width) {
        fail(ErrorKind::kDimensionMismatch, "input state shape differs from the circuit");
    }
    if (std::abs(init.norm_squared() - 1) > 1e-9) {
        fail(ErrorKind::kUnnormalizedInput, "input state is not normalized");
    }
    std::vector<SparseAmplitude> entries;
    for (std::size_t i = 0; i < init.size(); ++i) {
        if (init[i] != Complex(0, 0)) {
            entries.push_back({i, init[i]});
        }
    }
    Impl::Worker w{init, {}, {}, {}, nullptr, {}, {}};
    if (!impl_->use_sparse(entries.size())) {
        return impl_->execute_dense(w, rng, nullptr, observer);
    }
    for (const auto &e : entries) {
        auto image = impl_->propagate(e.index, w.digits);
        w.reference.push_back({image.index, image.amp * e.amp});
    }
    std::sort(w.reference.begin(), w.reference.end(),
              [](const SparseAmplitude &a, const SparseAmplitude &b) { return a.index < b.index; });
    impl_->sparse_load(w.sparse, entries);
    return impl_->execute_sparse(w, rng, observer);
}

std::vector<double> TrajectorySimulator::run_trials(std::uint64_t seed, std::size_t trials, int parallelism) const {
    std::vector<double> out(trials);
    std::atomic<std::size_t> next{0};
    bool dense = !impl_->use_sparse(impl_->support.size());
    auto work = [&] {
        Impl::Worker w{StateVector(impl_->dim, dense ? impl_->width : 0), {}, {}, {}, nullptr, {}, {}};
        while (true) {
            std::size_t t = next.fetch_add(1);
            if (t >= trials) {
                return;
            }
            Rng rng = substream(seed, t);
            out[t] = impl_->random_trial(w, rng);
        }
    };
    std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), 1,
                                                  std::max<std::size_t>(trials, 1));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(work);
        }
    }
    return out;
}

double run_trajectory(const Circuit &c, const NoiseModel &nm, const StateVector &init, Rng &rng) {
    return TrajectorySimulator(c, nm).run(init, rng);
}

TrajectoryStats run_experiment(const Circuit &c, const NoiseModel &nm, std::size_t trials, std::uint64_t seed,
                               int parallelism, bool keep_fidelities) {
    if (trials < 1) {
        fail(ErrorKind::kInvalidDimension, "an experiment needs at least one trial");
    }
    std::vector<double> fidelities = TrajectorySimulator(c, nm).run_trials(seed, trials, parallelism);
    TrajectoryStats stats;
    stats.trials = trials;
    double sum = 0;
    for (double f : fidelities) {
        sum += f;
    }
    stats.mean_fidelity = sum / static_cast<double>(trials);
    if (trials > 1) {
        double sq = 0;
        for (double f : fidelities) {
            sq += (f - stats.mean_fidelity) * (f - stats.mean_fidelity);
        }
        stats.standard_error = std::sqrt(sq / static_cast<double>(trials - 1)) / std::sqrt(static_cast<double>(trials));
    }
    if (keep_fidelities) {
        stats.fidelities = std::move(fidelities);
    }
    return stats;
}

}  // namespace quditsim
