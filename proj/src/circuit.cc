#include "quditsim/circuit.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "quditsim/error.h"

namespace quditsim {

Circuit::Circuit(int dim, int width) : dim_(dim), width_(width) {
    if (dim < 2) {
        fail(ErrorKind::kInvalidDimension, "circuit dimension must be at least 2");
    }
    if (width < 0) {
        fail(ErrorKind::kInvalidDimension, "circuit width must be non-negative");
    }
}

void Circuit::append(GateInstance gate) {
    if (gate.dim() != dim_) {
        fail(ErrorKind::kDimensionMismatch, "gate '" + gate.base().name() + "' has d=" + std::to_string(gate.dim()) +
                                                " but circuit has d=" + std::to_string(dim_));
    }
    for (int q : gate.operands()) {
        if (q >= width_) {
            fail(ErrorKind::kDimensionMismatch,
                 "qudit " + std::to_string(q) + " outside circuit of width " + std::to_string(width_));
        }
    }
    gates_.push_back(std::move(gate));
}

void Circuit::append(const Circuit &other) {
    if (other.dim_ != dim_ || other.width_ > width_) {
        fail(ErrorKind::kDimensionMismatch, "cannot append a circuit of different dimension or larger width");
    }
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
}

Circuit Circuit::without_gate(std::size_t index) const {
    Circuit out(dim_, width_);
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        if (i != index) {
            out.gates_.push_back(gates_[i]);
        }
    }
    return out;
}

bool is_lowered(const Circuit &c) {
    return std::all_of(c.gates().begin(), c.gates().end(),
                       [](const GateInstance &g) { return g.operand_count() <= 2; });
}

std::vector<Moment> schedule_asap(const Circuit &c) {
    std::vector<int> next_free(c.width(), 0);
    std::vector<Moment> moments;
    for (const auto &g : c.gates()) {
        int slot = 0;
        auto ops = g.operands();
        for (int q : ops) {
            slot = std::max(slot, next_free[q]);
        }
        if (slot >= static_cast<int>(moments.size())) {
            moments.resize(slot + 1);
        }
        moments[slot].gates.push_back(g);
        moments[slot].has_two_qudit |= g.operand_count() >= 2;
        for (int q : ops) {
            next_free[q] = slot + 1;
        }
    }
    return moments;
}

CircuitMetrics metrics(const Circuit &c) {
    if (!is_lowered(c)) {
        fail(ErrorKind::kLoweringRequired, "metrics need a circuit of one- and two-qudit gates");
    }
    CircuitMetrics m;
    m.width = c.width();
    m.depth = static_cast<int>(schedule_asap(c).size());
    for (const auto &g : c.gates()) {
        if (g.operand_count() == 1) {
            ++m.single_qudit_count;
        } else {
            ++m.two_qudit_count;
        }
    }
    return m;
}

Circuit compose(const Circuit &a, const Circuit &b) {
    if (a.dim() != b.dim() || a.width() != b.width()) {
        fail(ErrorKind::kDimensionMismatch, "compose needs equal dimension and width");
    }
    Circuit out = a;
    out.append(b);
    return out;
}

Circuit inverse(const Circuit &c) {
    Circuit out(c.dim(), c.width());
    for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) {
        out.append(it->inverse());
    }
    return out;
}

std::string to_text(const Circuit &c) {
    std::ostringstream out;
    out << "CIRCUIT d=" << c.dim() << " width=" << c.width() << "\n";
    for (const auto &g : c.gates()) {
        out << "GATE " << g.base().name() << " d=" << g.dim() << " targets=";
        for (std::size_t i = 0; i < g.targets().size(); ++i) {
            out << (i ? "," : "") << g.targets()[i];
        }
        out << " controls=";
        for (std::size_t i = 0; i < g.controls().size(); ++i) {
            out << (i ? "," : "") << g.controls()[i].qudit << ":" << g.controls()[i].level;
        }
        out << "\n";
    }
    return out.str();
}

namespace {

int to_int(std::string_view s, int line_no) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        fail(ErrorKind::kParseError, "line " + std::to_string(line_no) + ": expected integer, got '" +
                                         std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    if (s.empty()) {
        return out;
    }
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

std::map<std::string_view, std::string_view> fields(const std::vector<std::string_view> &tokens, std::size_t from,
                                                    int line_no) {
    std::map<std::string_view, std::string_view> out;
    for (std::size_t i = from; i < tokens.size(); ++i) {
        auto eq = tokens[i].find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorKind::kParseError, "line " + std::to_string(line_no) + ": expected key=value, got '" +
                                             std::string(tokens[i]) + "'");
        }
        out[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
    }
    return out;
}

std::string_view require(const std::map<std::string_view, std::string_view> &f, std::string_view key, int line_no) {
    auto it = f.find(key);
    if (it == f.end()) {
        fail(ErrorKind::kParseError, "line " + std::to_string(line_no) + ": missing '" + std::string(key) + "'");
    }
    return it->second;
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
    std::optional<int> dim;
    std::optional<int> width;
    std::vector<GateInstance> gates;
    std::map<std::pair<std::string, int>, std::shared_ptr<const GateMatrix>> cache;
    int max_index = -1;
    int line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        std::vector<std::string_view> tokens;
        for (auto tok : split(line, ' ')) {
            while (!tok.empty() && (tok.back() == '\r' || tok.back() == '\t')) {
                tok.remove_suffix(1);
            }
            if (!tok.empty()) {
                tokens.push_back(tok);
            }
        }
        if (tokens.empty()) {
            continue;
        }
        if (tokens[0] == "CIRCUIT") {
            auto f = fields(tokens, 1, line_no);
            dim = to_int(require(f, "d", line_no), line_no);
            width = to_int(require(f, "width", line_no), line_no);
            continue;
        }
        if (tokens[0] != "GATE" || tokens.size() < 2) {
            fail(ErrorKind::kParseError, "line " + std::to_string(line_no) + ": expected GATE or CIRCUIT");
        }
        auto f = fields(tokens, 2, line_no);
        int d = to_int(require(f, "d", line_no), line_no);
        if (dim && *dim != d) {
            fail(ErrorKind::kDimensionMismatch, "line " + std::to_string(line_no) + ": mixed dimensions");
        }
        dim = d;
        std::vector<int> targets;
        for (auto t : split(require(f, "targets", line_no), ',')) {
            targets.push_back(to_int(t, line_no));
        }
        std::vector<ControlSpec> controls;
        auto cit = f.find("controls");
        if (cit != f.end()) {
            for (auto c : split(cit->second, ',')) {
                auto colon = c.find(':');
                if (colon == std::string_view::npos) {
                    fail(ErrorKind::kParseError, "line " + std::to_string(line_no) + ": control needs qudit:level");
                }
                controls.push_back({to_int(c.substr(0, colon), line_no), to_int(c.substr(colon + 1), line_no)});
            }
        }
        auto key = std::make_pair(std::string(tokens[1]), d);
        auto &base = cache[key];
        if (!base) {
            base = std::make_shared<const GateMatrix>(gate_from_name(tokens[1], d));
        }
        GateInstance g(base, std::move(targets), std::move(controls));
        for (int q : g.operands()) {
            max_index = std::max(max_index, q);
        }
        gates.push_back(std::move(g));
    }
    Circuit out(dim.value_or(3), width.value_or(max_index + 1));
    for (auto &g : gates) {
        out.append(std::move(g));
    }
    return out;
}

}  // namespace quditsim
