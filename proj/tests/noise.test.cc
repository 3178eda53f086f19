#include "quditsim/noise.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <unsupported/Eigen/KroneckerProduct>

#include "quditsim/rng.h"
#include "quditsim/trajectory.h"
#include "test_util.h"

using namespace quditsim;
using quditsim::testing::expect_kind;
using quditsim::testing::random_state;

namespace {

Matrix shift_power(int d, int j) {
    Matrix m = Matrix::Identity(d, d);
    for (int i = 0; i < j; ++i) {
        m = make_x_shift(1, d).matrix() * m;
    }
    return m;
}

Matrix clock_power(int d, int l) {
    Matrix m = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        m(k, k) = std::polar(1.0, 2 * std::numbers::pi * k * l / d);
    }
    return m;
}

// Binomial count check at `sigmas` standard deviations.
void expect_count(std::size_t count, std::size_t draws, double p, double sigmas, const std::string &what) {
    double mean = draws * p;
    double sd = std::sqrt(draws * p * (1 - p));
    EXPECT_LE(std::abs(count - mean), sigmas * sd + 1e-9) << what << ": " << count << " vs " << mean;
}

}  // namespace

TEST(noise, depolarizing_term_counts) {
    EXPECT_EQ(depolarizing_kraus(3, 1, 0.01).operators().size(), 9u);
    EXPECT_EQ(depolarizing_kraus(3, 2, 0.01).operators().size(), 81u);
    EXPECT_EQ(depolarizing_kraus(2, 1, 0.01).operators().size(), 4u);
    EXPECT_EQ(depolarizing_kraus(2, 2, 0.01).operators().size(), 16u);
}

TEST(noise, depolarizing_channels_are_complete) {
    for (int d : {2, 3, 4}) {
        for (int k : {1, 2}) {
            double p = 0.5 / (std::pow(d, 2 * k) - 1);
            auto ch = depolarizing_kraus(d, k, p);
            EXPECT_LT(ch.completeness_error(), 1e-9) << d << " " << k;
            double total = 0;
            for (double w : ch.probabilities()) {
                total += w;
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
        }
    }
}

TEST(noise, depolarizing_operators_are_weighted_paulis) {
    const int d = 3;
    const double p = 0.01;
    auto one = depolarizing_kraus(d, 1, p);
    for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l) {
            int e = j * d + l;
            double w = e == 0 ? 1 - 8 * p : p;
            Matrix expected = std::sqrt(w) * shift_power(d, j) * clock_power(d, l);
            EXPECT_LT((one.operators()[e] - expected).cwiseAbs().maxCoeff(), 1e-12) << e;
        }
    }
    auto two = depolarizing_kraus(d, 2, p);
    // Operand 0 is the most significant base-9 digit.
    int e = (1 * d + 2) * 9 + (2 * d + 0);
    Matrix a = shift_power(d, 1) * clock_power(d, 2);
    Matrix b = shift_power(d, 2) * clock_power(d, 0);
    Matrix expected = std::sqrt(p) * Matrix(Eigen::kroneckerProduct(a, b));
    EXPECT_LT((two.operators()[e] - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(noise, depolarizing_overflow_rejected) {
    expect_kind(ErrorKind::kProbabilityOverflow, [] { depolarizing_kraus(3, 2, 1.0 / 80); });
    expect_kind(ErrorKind::kProbabilityOverflow, [] { depolarizing_kraus(3, 1, -0.1); });
}

TEST(noise, depolarizing_draw_frequencies) {
    const double p = 0.01;
    auto ch = depolarizing_kraus(3, 2, p);
    const std::size_t draws = 1000000;
    std::vector<std::size_t> counts(ch.operators().size());
    Rng rng = substream(99, 0);
    for (std::size_t i = 0; i < draws; ++i) {
        ++counts[ch.sample(rng)];
    }
    double chi2 = 0;
    for (std::size_t e = 0; e < counts.size(); ++e) {
        double w = ch.probabilities()[e];
        expect_count(counts[e], draws, w, 4, "term " + std::to_string(e));
        chi2 += std::pow(counts[e] - draws * w, 2) / (draws * w);
    }
    // 80 degrees of freedom: mean 80, sd ~12.6.
    EXPECT_LT(chi2, 80 + 4 * std::sqrt(160.0));
}

TEST(noise, amplitude_damping_operators) {
    auto ch = amplitude_damping_kraus(3, 0.2, 0.5);
    ASSERT_EQ(ch.operators().size(), 3u);
    EXPECT_EQ(ch.draw_mode(), DrawMode::kStateDependent);
    EXPECT_NEAR(ch.operators()[0](1, 1).real(), std::sqrt(0.8), 1e-15);
    EXPECT_NEAR(ch.operators()[0](2, 2).real(), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(ch.operators()[1](0, 1).real(), std::sqrt(0.2), 1e-15);
    EXPECT_NEAR(ch.operators()[2](0, 2).real(), std::sqrt(0.5), 1e-15);
    for (double l1 : {0.0, 1e-4, 0.3, 1.0}) {
        for (double l2 : {0.0, 6e-4, 0.7, 1.0}) {
            EXPECT_LT(amplitude_damping_kraus(3, l1, l2).completeness_error(), 1e-9);
        }
        EXPECT_LT(amplitude_damping_kraus(2, l1).completeness_error(), 1e-9);
    }
    EXPECT_EQ(amplitude_damping_kraus(2, 0.1).operators().size(), 2u);
    expect_kind(ErrorKind::kInvalidDimension, [] { amplitude_damping_kraus(4, 0.1, 0.1); });
    expect_kind(ErrorKind::kInvalidProbability, [] { amplitude_damping_kraus(3, 1.5, 0.1); });
}

TEST(noise, idle_lambdas_values) {
    auto two = idle_lambdas(300e-9, 1e-3);
    EXPECT_NEAR(two.lambda1, 2.99955e-4, 1e-9);
    EXPECT_NEAR(two.lambda2, 5.99820e-4, 1e-9);
    auto one = idle_lambdas(100e-9, 1e-3);
    EXPECT_NEAR(one.lambda1, 1 - std::exp(-1e-4), 1e-15);
    EXPECT_EQ(idle_lambdas(0, 1e-3).lambda1, 0);
    EXPECT_EQ(idle_lambdas(1e-6, std::numeric_limits<double>::infinity()).lambda2, 0);
}

TEST(noise, superconducting_presets) {
    struct Row {
        const char *name;
        double total1, total2, t1;
    };
    for (Row r : {Row{"SC", 1e-4, 1e-3, 1e-3}, Row{"SC+T1", 1e-4, 1e-3, 10e-3}, Row{"SC+GATES", 1e-5, 1e-4, 1e-3},
                  Row{"SC+T1+GATES", 1e-5, 1e-4, 10e-3}, Row{"IBM_CURRENT", 1e-3, 1e-2, 0.1e-3}}) {
        auto m = preset(r.name);
        EXPECT_EQ(m.name, r.name);
        EXPECT_NEAR(3 * m.p1, r.total1, 1e-18);
        EXPECT_NEAR(15 * m.p2, r.total2, 1e-18);
        ASSERT_TRUE(m.t1_seconds.has_value());
        EXPECT_DOUBLE_EQ(*m.t1_seconds, r.t1);
        EXPECT_DOUBLE_EQ(m.dt_single_seconds, 100e-9);
        EXPECT_DOUBLE_EQ(m.dt_two_seconds, 300e-9);
        EXPECT_TRUE(m.idle_enabled);
        EXPECT_DOUBLE_EQ(m.channel_probability(3, 1), m.p1);
        EXPECT_NO_THROW(m.validate(3));
    }
}

TEST(noise, trapped_ion_presets) {
    struct Row {
        const char *name;
        double p1, p2;
    };
    for (Row r : {Row{"TI_QUBIT", 6.4e-4, 1.3e-4}, Row{"BARE_QUTRIT", 2.2e-4, 4.3e-4},
                  Row{"DRESSED_QUTRIT", 1.5e-4, 3.1e-4}}) {
        auto m = preset(r.name);
        EXPECT_DOUBLE_EQ(m.p1, r.p1);
        EXPECT_DOUBLE_EQ(m.p2, r.p2);
        EXPECT_FALSE(m.idle_enabled);
        EXPECT_DOUBLE_EQ(m.dt_single_seconds, 1e-6);
        EXPECT_DOUBLE_EQ(m.dt_two_seconds, 200e-6);
        EXPECT_EQ(m.budget, ErrorBudget::kPerGate);
        EXPECT_DOUBLE_EQ(m.channel_probability(3, 2), r.p2 / 80);
        EXPECT_DOUBLE_EQ(m.channel_probability(3, 1), r.p1 / 8);
        EXPECT_DOUBLE_EQ(m.channel_probability(2, 2), r.p2 / 15);
    }
    EXPECT_LT(preset("DRESSED_QUTRIT").p2, preset("BARE_QUTRIT").p2);
}

TEST(noise, none_preset_and_unknown) {
    auto m = preset("NONE");
    EXPECT_EQ(m.p1, 0);
    EXPECT_EQ(m.p2, 0);
    EXPECT_FALSE(m.idle_enabled);
    EXPECT_EQ(preset_names().size(), 9u);
    expect_kind(ErrorKind::kUnknownPreset, [] { preset("SC+SOMETHING"); });
}

TEST(noise, validate_rejects_overflow) {
    NoiseModel m;
    m.p2 = 0.02;
    expect_kind(ErrorKind::kProbabilityOverflow, [&] { m.validate(3); });
    EXPECT_NO_THROW(m.validate(2));
    m.p2 = -1;
    expect_kind(ErrorKind::kInvalidProbability, [&] { m.validate(3); });
    NoiseModel idle;
    idle.idle_enabled = true;
    idle.t1_seconds = 1e-3;
    expect_kind(ErrorKind::kInvalidProbability, [&] { idle.validate(3); });
}

TEST(noise, parse_model_file) {
    auto path = std::filesystem::temp_directory_path() / "quditsim_noise_test.txt";
    {
        std::ofstream f(path);
        f << "# custom device\nname = lab\np1 = 1e-5\np2=2e-4\nt1_seconds = 5e-3\n"
          << "dt_single_seconds = 50e-9\ndt_two_seconds = 250e-9\nidle_enabled = true\nbudget = per_gate\n";
    }
    auto m = load_noise_model(path.string());
    std::filesystem::remove(path);
    EXPECT_EQ(m.name, "lab");
    EXPECT_DOUBLE_EQ(m.p1, 1e-5);
    EXPECT_DOUBLE_EQ(m.p2, 2e-4);
    EXPECT_DOUBLE_EQ(*m.t1_seconds, 5e-3);
    EXPECT_DOUBLE_EQ(m.dt_single_seconds, 50e-9);
    EXPECT_DOUBLE_EQ(m.dt_two_seconds, 250e-9);
    EXPECT_TRUE(m.idle_enabled);
    EXPECT_EQ(m.budget, ErrorBudget::kPerGate);
    EXPECT_FALSE(parse_noise_model("t1_seconds = none\n").t1_seconds.has_value());
}

TEST(noise, parse_model_errors) {
    expect_kind(ErrorKind::kParseError, [] { parse_noise_model("p1 = abc\n"); });
    expect_kind(ErrorKind::kParseError, [] { parse_noise_model("p3 = 0.1\n"); });
    expect_kind(ErrorKind::kParseError, [] { parse_noise_model("p1\n"); });
    expect_kind(ErrorKind::kParseError, [] { parse_noise_model("idle_enabled = maybe\n"); });
    expect_kind(ErrorKind::kUnknownPreset, [] { load_noise_model("/nonexistent/noise.txt"); });
}

TEST(noise, reference_damping_draw_matches_branch_weights) {
    // |psi> = (|0> + |1> + |2>)/sqrt(3) on one qutrit: P(K1) = l1/3, P(K2) = l2/3.
    auto ch = amplitude_damping_kraus(3, 0.3, 0.6);
    const std::size_t draws = 100000;
    std::vector<std::size_t> counts(3);
    Rng rng = substream(5, 1);
    for (std::size_t i = 0; i < draws; ++i) {
        StateVector s(3, 1);
        s[0] = s[1] = s[2] = 1 / std::sqrt(3.0);
        auto k = ch.apply_state_dependent(s, 0, rng);
        ++counts[k];
        if (k > 0) {
            EXPECT_NEAR(std::norm(s[0]), 1.0, 1e-12);
        }
    }
    expect_count(counts[1], draws, 0.1, 4, "K1");
    expect_count(counts[2], draws, 0.2, 4, "K2");
}

TEST(noise, idle_layer_frequencies_match_joint_branch_norms) {
    const int width = 3;
    const IdleLambdas lam{0.3, 0.5};
    auto ch = amplitude_damping_kraus(3, lam.lambda1, lam.lambda2);
    std::mt19937_64 seed_rng(8);
    StateVector psi = random_state(3, width, seed_rng);

    // Oracle: the joint outcome (i_0, i_1, i_2) has probability
    // ||(K_i0 x K_i1 x K_i2) psi||^2 and leaves the normalized branch.
    std::map<std::vector<int>, std::pair<double, Eigen::VectorXcd>> oracle;
    Eigen::VectorXcd v(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        v(i) = psi[i];
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            for (int c = 0; c < 3; ++c) {
                Matrix k = Eigen::kroneckerProduct(
                    ch.operators()[a], Matrix(Eigen::kroneckerProduct(ch.operators()[b], ch.operators()[c])));
                Eigen::VectorXcd out = k * v;
                oracle[{a, b, c}] = {out.squaredNorm(), out};
            }
        }
    }

    const std::size_t draws = 100000;
    std::map<std::vector<int>, std::size_t> counts;
    Rng rng = substream(77, 3);
    for (std::size_t i = 0; i < draws; ++i) {
        StateVector s = psi;
        auto outcome = apply_idle_layer(s, lam, rng);
        ++counts[outcome];
        if (i < 200) {
            const auto &[p, branch] = oracle.at(outcome);
            ASSERT_GT(p, 0);
            Eigen::VectorXcd expected = branch / std::sqrt(p);
            for (std::size_t j = 0; j < s.size(); ++j) {
                EXPECT_NEAR(std::abs(s[j] - expected(j)), 0, 1e-10);
            }
        }
    }
    double total = 0;
    for (const auto &[outcome, entry] : oracle) {
        total += entry.first;
        expect_count(counts[outcome], draws, entry.first, 4, "outcome");
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(noise, idle_layer_without_decay_is_identity) {
    std::mt19937_64 seed_rng(9);
    StateVector psi = random_state(3, 4, seed_rng);
    StateVector s = psi;
    Rng rng = substream(1, 1);
    auto outcome = apply_idle_layer(s, {}, rng);
    EXPECT_EQ(outcome, std::vector<int>(4, 0));
    EXPECT_NEAR(fidelity(s, psi), 1.0, 1e-12);
}

TEST(noise, no_error_weights) {
    EXPECT_NEAR(depolarizing_kraus(3, 1, 1e-3).probabilities()[0], 1 - 8e-3, 1e-15);
    EXPECT_NEAR(depolarizing_kraus(3, 2, 1e-3).probabilities()[0], 1 - 80e-3, 1e-15);
    EXPECT_NEAR(depolarizing_kraus(2, 2, 1e-3).probabilities()[0], 1 - 15e-3, 1e-15);
}

TEST(noise, damping_branch_weights_for_basis_states) {
    auto ch = amplitude_damping_kraus(3, 0.3, 0.5);
    Eigen::Vector3cd zero(1, 0, 0), two(0, 0, 1);
    EXPECT_EQ((ch.operators()[1] * zero).squaredNorm(), 0);
    EXPECT_EQ((ch.operators()[2] * zero).squaredNorm(), 0);
    EXPECT_NEAR((ch.operators()[2] * two).squaredNorm(), 0.5, 1e-15);
    StateVector s = StateVector::basis(3, {2});
    std::size_t k = 0;
    for (std::uint64_t seed = 0; k != 2; ++seed) {
        s = StateVector::basis(3, {2});
        Rng rng = substream(seed, 0);
        k = ch.apply_state_dependent(s, 0, rng);
    }
    EXPECT_NEAR(std::norm(s[0]), 1.0, 1e-15);
}

TEST(noise, lambda_two_dominates_lambda_one) {
    for (double dt : {1e-9, 1e-7, 1e-5, 1e-3}) {
        auto l = idle_lambdas(dt, 1e-3);
        EXPECT_GE(l.lambda2, l.lambda1);
    }
}
