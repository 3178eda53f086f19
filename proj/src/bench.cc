#include "quditsim/bench.h"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "quditsim/constructions.h"
#include "quditsim/error.h"
#include "quditsim/noise.h"
#include "quditsim/trajectory.h"

namespace quditsim {

namespace {

int to_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        fail(ErrorKind::kParseError, "expected an integer, got '" + std::string(s) + "'");
    }
    return v;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Rounded the same way as the CSV columns so both formats agree.
double rounded(double v) {
    return std::stod(fixed(v, 10));
}

NoiseModel resolve_noise(const std::string &spec) {
    for (const auto &name : preset_names()) {
        if (name == spec) {
            return preset(spec);
        }
    }
    if (std::filesystem::is_regular_file(spec)) {
        return load_noise_model(spec);
    }
    fail(ErrorKind::kUnknownPreset, "'" + spec + "' is neither a noise preset nor a readable file");
}

}  // namespace

Range parse_range(std::string_view text) {
    auto dots = text.find("..");
    Range r;
    if (dots == std::string_view::npos) {
        r.lo = r.hi = to_int(text);
    } else {
        r.lo = to_int(text.substr(0, dots));
        r.hi = to_int(text.substr(dots + 2));
    }
    if (r.lo > r.hi) {
        fail(ErrorKind::kParseError, "empty range '" + std::string(text) + "'");
    }
    return r;
}

Format parse_format(std::string_view text) {
    if (text == "csv") {
        return Format::kCsv;
    }
    if (text == "json") {
        return Format::kJson;
    }
    fail(ErrorKind::kParseError, "format must be csv or json");
}

std::size_t max_amplitudes_from_env() {
    const char *env = std::getenv("QUDITSIM_MAX_AMPLITUDES");
    if (env == nullptr || *env == '\0') {
        return kDefaultMaxAmplitudes;
    }
    std::size_t v = 0;
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
        fail(ErrorKind::kParseError, "QUDITSIM_MAX_AMPLITUDES must be a positive integer");
    }
    return v;
}

int cmd_verify(const VerifyOptions &opts, std::ostream &out, std::ostream &log) {
    int status = 0;
    for (int n = opts.range.lo; n <= opts.range.hi; ++n) {
        Circuit c = build_circuit(opts.circuit, n);
        if (opts.drop_gate) {
            if (*opts.drop_gate >= c.size()) {
                fail(ErrorKind::kParseError, "cannot drop gate " + std::to_string(*opts.drop_gate) + " of " +
                                                 std::to_string(c.size()));
            }
            c = c.without_gate(*opts.drop_gate);
        }
        auto oracle = [&](const BasisLabel &in) { return expected_output(opts.circuit, n, in); };
        log << "verifying " << circuit_kind_name(opts.circuit) << " n=" << n << "\n";
        VerifyResult direct = verify_truth_table(c, oracle);
        VerifyResult lowered = direct.ok() ? verify_truth_table(lower_circuit(c), oracle) : direct;
        out << circuit_kind_name(opts.circuit) << " n=" << n << " width=" << c.width()
            << " inputs=" << direct.inputs_checked << " lowered_inputs=" << (direct.ok() ? lowered.inputs_checked : 0);
        const VerifyResult &bad = direct.ok() ? lowered : direct;
        if (bad.ok()) {
            out << " pass\n";
            continue;
        }
        out << " FAIL " << error_kind_name(ErrorKind::kVerificationFailure) << " input=" << format_label(*bad.counterexample)
            << " got=" << format_label(bad.got) << " expected=" << format_label(bad.expected) << "\n";
        status = 1;
        break;
    }
    return status;
}

int cmd_metrics(const MetricsOptions &opts, std::ostream &out, std::ostream &log) {
    nlohmann::json rows = nlohmann::json::array();
    if (opts.format == Format::kCsv) {
        out << "circuit,n,width,depth,single_qudit_count,two_qudit_count,two_qudit_per_n\n";
    }
    for (int n = opts.range.lo; n <= opts.range.hi; ++n) {
        log << "metrics " << circuit_kind_name(opts.circuit) << " n=" << n << "\n";
        CircuitMetrics m = metrics(lower_circuit(build_circuit(opts.circuit, n)));
        double per_n = static_cast<double>(m.two_qudit_count) / n;
        if (opts.format == Format::kCsv) {
            out << circuit_kind_name(opts.circuit) << "," << n << "," << m.width << "," << m.depth << ","
                << m.single_qudit_count << "," << m.two_qudit_count << "," << fixed(per_n, 4) << "\n";
        } else {
            rows.push_back({{"circuit", circuit_kind_name(opts.circuit)},
                            {"n", n},
                            {"width", m.width},
                            {"depth", m.depth},
                            {"single_qudit_count", m.single_qudit_count},
                            {"two_qudit_count", m.two_qudit_count},
                            {"two_qudit_per_n", per_n}});
        }
    }
    if (opts.format == Format::kJson) {
        out << rows.dump(2) << "\n";
    }
    return 0;
}

std::string csv_header(bool raw) {
    std::string h = "circuit,n,noise,trials,mean_fidelity,stderr,wall_seconds,seed";
    return raw ? h + ",raw_fidelities" : h;
}

std::string to_csv(const ExperimentRecord &r, bool raw) {
    std::ostringstream o;
    o << r.circuit << "," << r.n << "," << r.noise << "," << r.trials << "," << fixed(r.mean_fidelity, 10) << ","
      << fixed(r.stderr_, 10) << "," << fixed(r.wall_seconds, 3) << "," << r.seed;
    if (raw) {
        o << ",";
        for (std::size_t i = 0; i < r.raw.size(); ++i) {
            o << (i ? ";" : "") << exact(r.raw[i]);
        }
    }
    return o.str();
}

std::string to_json_line(const ExperimentRecord &r, bool raw) {
    nlohmann::json j = {{"circuit", r.circuit},
                        {"n", r.n},
                        {"noise", r.noise},
                        {"trials", r.trials},
                        {"mean_fidelity", rounded(r.mean_fidelity)},
                        {"stderr", rounded(r.stderr_)},
                        {"wall_seconds", std::stod(fixed(r.wall_seconds, 3))},
                        {"seed", r.seed}};
    if (raw) {
        j["raw_fidelities"] = r.raw;
    }
    return j.dump();
}

int cmd_simulate(const SimulateOptions &opts, std::ostream &out, std::ostream &log) {
    NoiseModel nm = resolve_noise(opts.noise);
    if (opts.trials < 1) {
        fail(ErrorKind::kParseError, "trials must be at least 1");
    }
    if (opts.format == Format::kCsv) {
        out << csv_header(opts.raw) << "\n" << std::flush;
    }
    for (int n = opts.range.lo; n <= opts.range.hi; ++n) {
        Circuit c = lower_circuit(build_circuit(opts.circuit, n));
        std::size_t amplitudes = 1;
        for (int q = 0; q < c.width(); ++q) {
            amplitudes *= static_cast<std::size_t>(c.dim());
            if (amplitudes > opts.max_amplitudes) {
                fail(ErrorKind::kTooLarge, "out-of-memory guard: " + std::to_string(c.width()) +
                                               " qudits exceed the limit of " + std::to_string(opts.max_amplitudes) +
                                               " amplitudes (set QUDITSIM_MAX_AMPLITUDES to raise it)");
            }
        }
        log << "simulating " << circuit_kind_name(opts.circuit) << " n=" << n << " noise=" << nm.name
            << " trials=" << opts.trials << " threads=" << opts.threads << "\n";
        auto start = std::chrono::steady_clock::now();
        TrajectoryStats stats = run_experiment(c, nm, opts.trials, opts.seed, opts.threads, opts.raw);
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        ExperimentRecord r{std::string(circuit_kind_name(opts.circuit)),
                           n,
                           nm.name,
                           stats.trials,
                           stats.mean_fidelity,
                           stats.standard_error,
                           opts.timing ? wall : 0.0,
                           opts.seed,
                           std::move(stats.fidelities)};
        out << (opts.format == Format::kCsv ? to_csv(r, opts.raw) : to_json_line(r, opts.raw)) << "\n" << std::flush;
        log << "  mean_fidelity=" << fixed(r.mean_fidelity, 6) << " stderr=" << fixed(r.stderr_, 6)
            << " wall_seconds=" << fixed(wall, 1) << "\n";
    }
    return 0;
}

}  // namespace quditsim
