#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "quditsim/verify.h"

namespace quditsim {

struct Range {
    int lo = 0;
    int hi = 0;
};

/// "7" or "2..13" (inclusive).
Range parse_range(std::string_view text);

enum class Format { kCsv, kJson };
Format parse_format(std::string_view text);

/// Default limit on d^width for simulation, overridable through the
/// QUDITSIM_MAX_AMPLITUDES environment variable.
constexpr std::size_t kDefaultMaxAmplitudes = 4782969;  // 3^14
std::size_t max_amplitudes_from_env();

struct VerifyOptions {
    CircuitKind circuit = CircuitKind::kGenToffoli;
    Range range;
    /// Fault injection: remove this gate before checking.
    std::optional<std::size_t> drop_gate;
};

/// Writes one line per n and returns the process exit status (1 on any
/// mismatch).
int cmd_verify(const VerifyOptions &opts, std::ostream &out, std::ostream &log);

struct MetricsOptions {
    CircuitKind circuit = CircuitKind::kGenToffoli;
    Range range;
    Format format = Format::kCsv;
};

int cmd_metrics(const MetricsOptions &opts, std::ostream &out, std::ostream &log);

struct ExperimentRecord {
    std::string circuit;
    int n = 0;
    std::string noise;
    std::size_t trials = 0;
    double mean_fidelity = 0;
    double stderr_ = 0;
    double wall_seconds = 0;
    std::uint64_t seed = 0;
    std::vector<double> raw;
};

std::string csv_header(bool raw);
std::string to_csv(const ExperimentRecord &r, bool raw);
std::string to_json_line(const ExperimentRecord &r, bool raw);

struct SimulateOptions {
    CircuitKind circuit = CircuitKind::kGenToffoli;
    Range range;
    /// Preset name or path to a key=value file.
    std::string noise = "NONE";
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    Format format = Format::kCsv;
    bool raw = false;
    /// Report wall_seconds as 0 so that output is byte-reproducible.
    bool timing = true;
    std::size_t max_amplitudes = kDefaultMaxAmplitudes;
};

/// Streams one record per n to `out` as each experiment finishes.
int cmd_simulate(const SimulateOptions &opts, std::ostream &out, std::ostream &log);

}  // namespace quditsim
