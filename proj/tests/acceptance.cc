// Standalone acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "quditsim/bench.h"
#include "quditsim/circuit.h"
#include "quditsim/constructions.h"
#include "quditsim/error.h"
#include "quditsim/gates.h"
#include "quditsim/noise.h"
#include "quditsim/rng.h"
#include "quditsim/state_vector.h"
#include "quditsim/trajectory.h"
#include "quditsim/verify.h"

using namespace quditsim;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            if (detail.tellp() > 0) {
                detail << "; ";
            }
            pass = false;
            detail << what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char *f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Circuit lowered_gen_toffoli(int n) { return lower_circuit(build_circuit(CircuitKind::kGenToffoli, n)); }

// Independent truth tables on {0,1} labels.
BasisLabel toffoli_oracle(const BasisLabel &in) {
    BasisLabel out = in;
    bool all = std::all_of(in.begin(), in.end() - 1, [](Level x) { return x == 1; });
    if (all) {
        out.back() ^= 1;
    }
    return out;
}

BasisLabel increment_oracle(const BasisLabel &in) {
    BasisLabel out = in;
    for (int q = static_cast<int>(out.size()) - 1; q >= 0; --q) {
        if (out[q] == 0) {
            out[q] = 1;
            break;
        }
        out[q] = 0;
    }
    return out;
}

Outcome criterion1() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    std::size_t inputs = 0;
    for (int n = 2; n <= 13; ++n) {
        Circuit c = build_circuit(CircuitKind::kGenToffoli, n);
        for (const Circuit &k : {c, lower_circuit(c)}) {
            auto r = verify_truth_table(k, toffoli_oracle);
            inputs += r.inputs_checked;
            o.require(r.ok() && r.inputs_checked == (std::size_t{1} << (n + 1)),
                      "n=" + std::to_string(n) + (r.ok() ? " incomplete" : " mismatch at " + format_label(*r.counterexample)));
        }
    }
    double t = seconds_since(t0);
    o.require(t < 300, "took " + fmt("%.1f", t) + " s");
    o.detail << (o.pass ? "" : "; ") << "n=2..13 unlowered and lowered, " << inputs << " inputs in " << fmt("%.1f", t)
             << " s";
    return o;
}

Outcome criterion2() {
    Outcome o;
    for (int n = 1; n <= 10; ++n) {
        Circuit c = build_circuit(CircuitKind::kIncrementer, n);
        for (const Circuit &k : {c, lower_circuit(c)}) {
            auto r = verify_truth_table(k, increment_oracle);
            o.require(r.ok() && r.inputs_checked == (std::size_t{1} << n), "n=" + std::to_string(n));
        }
    }
    o.detail << (o.pass ? "" : "; ") << "n=1..10 all inputs map to x+1 mod 2^n";
    return o;
}

// Multi-controlled U on n+1 qubits, controls on the first n.
Matrix reference_controlled(int n, const Matrix &u2) {
    int dim = 1 << (n + 1);
    Matrix out = Matrix::Identity(dim, dim);
    out.block(dim - 2, dim - 2, 2, 2) = u2;
    return out;
}

Matrix restrict_to_qubits(const Matrix &m, int width, int d) {
    auto idx = qubit_subspace_indices(width, d);
    Matrix out(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out(i, j) = m(idx[i], idx[j]);
        }
    }
    return out;
}

Outcome criterion3() {
    Outcome o;
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    double worst = 0;
    for (int n = 1; n <= 4; ++n) {
        struct Case {
            GateMatrix target;
            Matrix u2;
        };
        // Qutrit Z restricted to {0,1} is diag(1, w); compare against that block.
        Matrix zw(2, 2);
        zw << 1, 0, 0, std::polar(1.0, 2 * std::numbers::pi / 3);
        for (const auto &cs : {Case{make_x_perm(0, 1, 3), x}, Case{make_z(3), zw}}) {
            Circuit c = lower_circuit(generalized_toffoli(n, cs.target));
            Matrix u = restrict_to_qubits(full_unitary(c), c.width(), 3);
            double dist = phase_aligned_distance(u, reference_controlled(n, cs.u2));
            worst = std::max(worst, dist);
            o.require(dist < 1e-9, "n=" + std::to_string(n) + " distance " + fmt("%.3g", dist));
        }
    }
    o.detail << (o.pass ? "" : "; ") << "n=1..4, X and Z targets, max distance " << fmt("%.2g", worst);
    return o;
}

Outcome criterion4() {
    Outcome o;
    std::ostringstream table;
    double last = 0;
    for (int n = 4; n <= 256; n *= 2) {
        auto m = metrics(lowered_gen_toffoli(n));
        last = static_cast<double>(m.two_qudit_count) / n;
        table << " n=" << n << ":" << fmt("%.3f", last);
    }
    o.require(last >= 5 && last <= 7, "two-qudit count / n at n=256 is " + fmt("%.3f", last) + ", outside [5, 7]");
    std::ostringstream sink, log;
    MetricsOptions mo;
    mo.range = {2, 64};
    o.require(cmd_metrics(mo, sink, log) == 0, "gen-toffoli metrics table");
    mo.circuit = CircuitKind::kIncrementer;
    mo.range = {1, 64};
    o.require(cmd_metrics(mo, sink, log) == 0, "incrementer metrics table");
    o.detail << (o.pass ? "" : "; ") << "count/n" << table.str();
    return o;
}

Outcome criterion5() {
    Outcome o;
    constexpr int kDoublingBound = 8;
    constexpr double kIncrementerBound = 6.0;
    std::map<int, std::size_t> depth;
    for (int n = 4; n <= 256; ++n) {
        if (n <= 128 || n % 2 == 0) {
            depth[n] = metrics(lowered_gen_toffoli(n)).depth;
        }
    }
    long worst_step = 0;
    for (int n = 4; n <= 128; ++n) {
        long step = static_cast<long>(depth[2 * n]) - static_cast<long>(depth[n]);
        worst_step = std::max(worst_step, step);
        o.require(step <= kDoublingBound, "depth(" + std::to_string(2 * n) + ") - depth(" + std::to_string(n) +
                                              ") = " + std::to_string(step));
    }
    double worst_ratio = 0;
    std::map<int, long> inc_depth;
    for (int n = 2; n <= 64; ++n) {
        auto d = metrics(lower_circuit(build_circuit(CircuitKind::kIncrementer, n))).depth;
        inc_depth[n] = static_cast<long>(d);
        double l = std::log2(static_cast<double>(n));
        double r = d / (l * l);
        worst_ratio = std::max(worst_ratio, r);
        o.require(r <= kIncrementerBound, "incrementer n=" + std::to_string(n) + " ratio " + fmt("%.2f", r));
    }
    // Quadratic growth in log2 n: the increase per doubling itself grows by at
    // most a fixed amount.
    constexpr long kSecondDifferenceBound = 16;
    long worst_second = 0;
    for (int n = 4; n <= 16; n *= 2) {
        long second = (inc_depth[4 * n] - inc_depth[2 * n]) - (inc_depth[2 * n] - inc_depth[n]);
        worst_second = std::max(worst_second, second);
        o.require(second <= kSecondDifferenceBound, "incrementer second difference " + std::to_string(second) +
                                                        " at n=" + std::to_string(n));
    }
    o.detail << (o.pass ? "" : "; ") << "max depth(2n)-depth(n)=" << worst_step << " (bound " << kDoublingBound
             << "), max incrementer depth/log2^2 n=" << fmt("%.2f", worst_ratio) << " (bound " << kIncrementerBound
             << "), max per-doubling growth step " << worst_second << " (bound " << kSecondDifferenceBound << ")";
    return o;
}

// Count outside mean +- 4 sigma of a binomial with probability p.
bool within_4_sigma(std::size_t count, std::size_t draws, double p) {
    double mean = draws * p;
    double sigma = std::sqrt(draws * p * (1 - p));
    return std::abs(static_cast<double>(count) - mean) <= 4 * sigma + 1e-12;
}

Outcome criterion6() {
    Outcome o;
    double worst = 0;
    std::vector<KrausChannel> channels;
    for (const auto &name : preset_names()) {
        NoiseModel nm = preset(name);
        for (int d : {2, 3}) {
            try {
                nm.validate(d);
            } catch (const QuditError &) {
                continue;
            }
            channels.push_back(depolarizing_kraus(d, 1, nm.channel_probability(d, 1)));
            channels.push_back(depolarizing_kraus(d, 2, nm.channel_probability(d, 2)));
            if (nm.idle_enabled && nm.t1_seconds) {
                for (double dt : {nm.dt_single_seconds, nm.dt_two_seconds}) {
                    auto l = idle_lambdas(dt, *nm.t1_seconds);
                    channels.push_back(amplitude_damping_kraus(d, l.lambda1, d == 3 ? l.lambda2 : 0));
                }
            }
        }
    }
    channels.push_back(amplitude_damping_kraus(3, 0.3, 0.5));
    channels.push_back(depolarizing_kraus(3, 2, 0.012));
    for (const auto &ch : channels) {
        worst = std::max(worst, ch.completeness_error());
    }
    o.require(worst < 1e-9, "completeness error " + fmt("%.3g", worst));

    // Depolarizing draws: 81 two-qutrit terms, 10^6 draws.
    {
        const std::size_t draws = 1000000;
        auto ch = depolarizing_kraus(3, 2, 0.01);
        std::vector<std::size_t> counts(ch.operators().size());
        Rng rng(2024);
        for (std::size_t i = 0; i < draws; ++i) {
            ++counts[ch.sample(rng)];
        }
        int bad = 0;
        for (std::size_t e = 0; e < counts.size(); ++e) {
            double p = e == 0 ? 1 - 80 * 0.01 : 0.01;
            bad += !within_4_sigma(counts[e], draws, p);
        }
        o.require(bad == 0, std::to_string(bad) + " depolarizing terms outside 4 sigma");
    }

    // State-dependent idle draws on three qutrits, 10^5 draws, against the
    // joint branch weights |(K_a x K_b x K_c) psi|^2.
    {
        const std::size_t draws = 100000;
        IdleLambdas lam{0.3, 0.5};
        auto ops = amplitude_damping_kraus(3, lam.lambda1, lam.lambda2).operators();
        Rng rng(99);
        StateVector psi(3, 3);
        double norm = 0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            psi[i] = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
            norm += std::norm(psi[i]);
        }
        Eigen::VectorXcd v(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            psi[i] /= std::sqrt(norm);
            v(i) = psi[i];
        }
        std::vector<double> expected(27);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (int c = 0; c < 3; ++c) {
                    Matrix k = Eigen::kroneckerProduct(ops[a], Eigen::kroneckerProduct(ops[b], ops[c]).eval()).eval();
                    expected[a * 9 + b * 3 + c] = (k * v).squaredNorm();
                }
            }
        }
        std::vector<std::size_t> counts(27);
        for (std::size_t i = 0; i < draws; ++i) {
            StateVector s = psi;
            auto out = apply_idle_layer(s, lam, rng);
            ++counts[out[0] * 9 + out[1] * 3 + out[2]];
        }
        int bad = 0;
        for (int e = 0; e < 27; ++e) {
            bad += !within_4_sigma(counts[e], draws, expected[e]);
        }
        o.require(bad == 0, std::to_string(bad) + " idle outcomes outside 4 sigma");
    }
    o.detail << (o.pass ? "" : "; ") << channels.size() << " channels, max completeness error " << fmt("%.2g", worst)
             << "; depolarizing 1e6 and idle 1e5 draws within 4 sigma";
    return o;
}

struct Estimate {
    double mean = 0;
    double se = 0;
    double sd = 0;
};

Estimate estimate(const std::vector<double> &f) {
    double n = static_cast<double>(f.size());
    double mean = 0;
    for (double x : f) {
        mean += x;
    }
    mean /= n;
    double ss = 0;
    for (double x : f) {
        ss += (x - mean) * (x - mean);
    }
    double sd = std::sqrt(ss / (n - 1));
    return {mean, sd / std::sqrt(n), sd};
}

Outcome criterion7() {
    Outcome o;
    const std::size_t trials = 100000;
    {
        Circuit c(2, 1);
        c.append(controlled(make_x_perm(0, 1, 2), {0}));
        NoiseModel nm;
        nm.name = "single-x";
        nm.p1 = 0.01;
        auto e = estimate(TrajectorySimulator(c, nm).run_trials(7, trials, threads()));
        double want = 1 - 2 * nm.p1;
        o.require(std::abs(e.mean - want) <= 3 * e.se,
                  "single X " + fmt("%.5f", e.mean) + " vs " + fmt("%.5f", want));
        o.detail << "single X " << fmt("%.5f", e.mean) << " (exact " << fmt("%.5f", want) << ", se "
                 << fmt("%.1e", e.se) << ")";
    }
    {
        Circuit c(3, 1);
        c.append(controlled(make_identity(3), {0}));
        NoiseModel nm;
        nm.name = "idle";
        nm.t1_seconds = 1.0;
        nm.dt_single_seconds = std::log(2.0) / 2;
        nm.dt_two_seconds = 1.0;
        nm.idle_enabled = true;
        double lambda2 = 1 - std::exp(-2 * nm.dt_single_seconds / 1.0);
        TrajectorySimulator sim(c, nm);
        StateVector two = StateVector::basis(3, {2});
        double sum = 0, sq = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            Rng rng = substream(8, t);
            double f = sim.run(two, rng);
            sum += f;
            sq += f * f;
        }
        double mean = sum / trials;
        double se = std::sqrt(std::max(0.0, (sq - trials * mean * mean) / (trials - 1)) / trials);
        // Two outcomes: K0 keeps |2> (fidelity 1), K2 sends it to |0> (fidelity 0).
        double want = 1 - lambda2;
        o.require(std::abs(mean - want) <= 3 * se, "idle |2> " + fmt("%.5f", mean) + " vs " + fmt("%.5f", want));
        o.detail << "; idle |2> " << fmt("%.5f", mean) << " (exact " << fmt("%.5f", want) << ", se "
                 << fmt("%.1e", se) << ")";
    }
    return o;
}

Outcome criterion8() {
    Outcome o;
    const std::size_t min_trials = 1000;
    const std::size_t max_trials = 200000;
    const double target = 0.01;
    Circuit c = lowered_gen_toffoli(13);
    std::map<std::string, Estimate> got;
    for (const char *name : {"SC", "SC+T1", "SC+GATES", "SC+T1+GATES", "BARE_QUTRIT", "DRESSED_QUTRIT"}) {
        auto t0 = std::chrono::steady_clock::now();
        TrajectorySimulator sim(c, preset(name));
        std::size_t trials = min_trials;
        Estimate e;
        for (;;) {
            e = estimate(sim.run_trials(13, trials, threads()));
            if (2 * e.se < target || trials >= max_trials) {
                break;
            }
            double need = std::pow(2 * e.sd / target, 2) * 1.1;
            trials = std::min(max_trials, std::max(2 * trials, static_cast<std::size_t>(std::ceil(need))));
        }
        got[name] = e;
        o.require(2 * e.se < target, std::string(name) + " 2 sigma " + fmt("%.4f", 2 * e.se));
        o.detail << (o.detail.tellp() > 0 ? "; " : "") << name << " " << fmt("%.4f", e.mean) << " +- "
                 << fmt("%.4f", 2 * e.se) << " (" << trials << " trials, " << fmt("%.0f", seconds_since(t0)) << " s)";
        std::fflush(stdout);
    }
    o.require(got["SC+T1+GATES"].mean > 0.9, "SC+T1+GATES not above 0.90");
    for (const char *name : {"SC", "SC+T1", "SC+GATES"}) {
        double m = got[name].mean;
        o.require(m >= 0.45 && m <= 0.90, std::string(name) + " outside [0.45, 0.90]");
    }
    for (const char *name : {"BARE_QUTRIT", "DRESSED_QUTRIT"}) {
        double m = got[name].mean;
        o.require(m >= 0.85 && m <= 1.0, std::string(name) + " outside [0.85, 1.00]");
    }
    o.require(got["DRESSED_QUTRIT"].mean >= got["BARE_QUTRIT"].mean, "DRESSED_QUTRIT below BARE_QUTRIT");
    return o;
}

Outcome criterion9() {
    Outcome o;
    auto run = [](SimulateOptions so, int t) {
        so.threads = t;
        std::ostringstream out, log;
        cmd_simulate(so, out, log);
        return out.str();
    };
    struct Case {
        CircuitKind kind;
        Range range;
        const char *noise;
        Format format;
    };
    int cases = 0;
    for (const auto &cs : {Case{CircuitKind::kGenToffoli, {2, 8}, "SC+T1+GATES", Format::kCsv},
                           Case{CircuitKind::kGenToffoli, {5, 6}, "IBM_CURRENT", Format::kJson},
                           Case{CircuitKind::kIncrementer, {3, 6}, "SC", Format::kCsv}}) {
        SimulateOptions so;
        so.circuit = cs.kind;
        so.range = cs.range;
        so.noise = cs.noise;
        so.trials = 200;
        so.seed = 42;
        so.format = cs.format;
        so.raw = true;
        so.timing = false;
        std::string one = run(so, 1);
        for (int t : {2, 4, 7}) {
            o.require(run(so, t) == one, std::string(cs.noise) + " differs at " + std::to_string(t) + " threads");
        }
        ++cases;
    }
    o.detail << (o.pass ? "" : "; ") << cases << " experiments byte-identical at 1, 2, 4 and 7 threads";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3,
                                                            criterion4, criterion5, criterion6,
                                                            criterion7, criterion8, criterion9};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        failed += !o.pass;
        std::printf("criterion %zu: %s %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
