#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "quditsim/bench.h"
#include "quditsim/error.h"

using namespace quditsim;

namespace {

struct Common {
    std::string circuit = "gen-toffoli";
    std::string controls;
    std::string width;
    std::string format = "csv";
    std::string out_path;
};

void add_common(CLI::App *cmd, Common &c) {
    cmd->add_option("--circuit", c.circuit, "toffoli, gen-toffoli or incrementer")
        ->check(CLI::IsMember({"toffoli", "gen-toffoli", "incrementer"}));
    cmd->add_option("--controls", c.controls, "control count or range a..b (toffoli family)");
    cmd->add_option("--width", c.width, "register width or range a..b (incrementer)");
    cmd->add_option("--out", c.out_path, "write data here instead of standard output");
}

Range resolve_range(const Common &c, CircuitKind kind) {
    std::string text = kind == CircuitKind::kIncrementer ? c.width : c.controls;
    if (text.empty()) {
        text = kind == CircuitKind::kIncrementer ? c.controls : c.width;
    }
    if (text.empty()) {
        if (kind == CircuitKind::kToffoli) {
            return {2, 2};
        }
        throw CLI::ValidationError(kind == CircuitKind::kIncrementer ? "--width is required"
                                                                     : "--controls is required");
    }
    return parse_range(text);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Qudit circuit construction and noisy trajectory simulation"};
    app.require_subcommand(1);

    Common verify_c;
    std::optional<std::size_t> drop_gate;
    auto *verify = app.add_subcommand("verify", "exhaustive classical truth-table check");
    add_common(verify, verify_c);
    verify->add_option("--drop-gate", drop_gate, "remove gate INDEX before checking (fault injection)");

    Common metrics_c;
    auto *metrics = app.add_subcommand("metrics", "depth and gate counts of the lowered circuit");
    add_common(metrics, metrics_c);
    metrics->add_option("--format", metrics_c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    Common sim_c;
    SimulateOptions sim;
    auto *simulate = app.add_subcommand("simulate", "noisy trajectory experiments");
    add_common(simulate, sim_c);
    simulate->add_option("--format", sim_c.format, "csv or json lines")->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--noise", sim.noise, "preset name or key=value file")->required();
    simulate->add_option("--trials", sim.trials, "trajectories per n")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "experiment seed");
    simulate->add_option("--threads", sim.threads, "worker threads")->check(CLI::PositiveNumber);
    simulate->add_flag("--raw", sim.raw, "append per-trial fidelities to each record");
    bool no_timing = false;
    simulate->add_flag("--no-timing", no_timing, "report wall_seconds as 0");

    CLI11_PARSE(app, argc, argv);

    auto run = [&](const Common &c, auto &&body) -> int {
        if (c.out_path.empty()) {
            return body(std::cout);
        }
        std::ofstream file(c.out_path);
        if (!file) {
            std::cerr << "cannot open " << c.out_path << "\n";
            return 2;
        }
        return body(file);
    };

    try {
        if (*verify) {
            VerifyOptions o;
            o.circuit = parse_circuit_kind(verify_c.circuit);
            o.range = resolve_range(verify_c, o.circuit);
            o.drop_gate = drop_gate;
            return run(verify_c, [&](std::ostream &out) { return cmd_verify(o, out, std::cerr); });
        }
        if (*metrics) {
            MetricsOptions o;
            o.circuit = parse_circuit_kind(metrics_c.circuit);
            o.range = resolve_range(metrics_c, o.circuit);
            o.format = parse_format(metrics_c.format);
            return run(metrics_c, [&](std::ostream &out) { return cmd_metrics(o, out, std::cerr); });
        }
        sim.circuit = parse_circuit_kind(sim_c.circuit);
        sim.range = resolve_range(sim_c, sim.circuit);
        sim.format = parse_format(sim_c.format);
        sim.timing = !no_timing;
        sim.max_amplitudes = max_amplitudes_from_env();
        return run(sim_c, [&](std::ostream &out) { return cmd_simulate(sim, out, std::cerr); });
    } catch (const CLI::Error &e) {
        return app.exit(e);
    } catch (const QuditError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
