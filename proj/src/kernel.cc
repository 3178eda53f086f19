#include "kernel.h"

#include <array>

namespace quditsim::detail {

namespace {

constexpr std::size_t kMaxLocal = 27;

std::vector<std::size_t> target_offsets(int dim, int width, const std::vector<int> &targets) {
    std::size_t count = ipow(dim, static_cast<int>(targets.size()));
    std::vector<std::size_t> out(count, 0);
    for (std::size_t local = 0; local < count; ++local) {
        std::size_t rest = local;
        std::size_t off = 0;
        for (int t = static_cast<int>(targets.size()) - 1; t >= 0; --t) {
            off += (rest % dim) * ipow(dim, width - 1 - targets[t]);
            rest /= dim;
        }
        out[local] = off;
    }
    return out;
}

template <std::size_t D>
void permute_fixed(const CompiledGate &g, Complex *amps, int width) {
    std::array<std::size_t, D> off;
    std::array<std::size_t, D> dst;
    std::array<Complex, D> ph;
    for (std::size_t m = 0; m < D; ++m) {
        off[m] = g.offsets[m];
        dst[m] = g.offsets[g.image[m]];
        ph[m] = g.phase[m];
    }
    bool unit = g.unit_phases;
    for_each_run(g.dim, width, g.fixed, [&](std::size_t start, std::size_t len) {
        for (std::size_t j = 0; j < len; ++j) {
            Complex *p = amps + start + j;
            std::array<Complex, D> tmp;
            for (std::size_t m = 0; m < D; ++m) {
                tmp[m] = p[off[m]];
            }
            if (unit) {
                for (std::size_t m = 0; m < D; ++m) {
                    p[dst[m]] = tmp[m];
                }
            } else {
                for (std::size_t m = 0; m < D; ++m) {
                    p[dst[m]] = ph[m] * tmp[m];
                }
            }
        }
    });
}

void permute_generic(const CompiledGate &g, Complex *amps, int width) {
    std::size_t d = g.offsets.size();
    for_each_run(g.dim, width, g.fixed, [&](std::size_t start, std::size_t len) {
        std::array<Complex, kMaxLocal> tmp;
        for (std::size_t j = 0; j < len; ++j) {
            Complex *p = amps + start + j;
            for (std::size_t m = 0; m < d; ++m) {
                tmp[m] = p[g.offsets[m]];
            }
            for (std::size_t m = 0; m < d; ++m) {
                p[g.offsets[g.image[m]]] = g.phase[m] * tmp[m];
            }
        }
    });
}

void apply_diagonal(const CompiledGate &g, Complex *amps, int width) {
    std::size_t d = g.offsets.size();
    for_each_run(g.dim, width, g.fixed, [&](std::size_t start, std::size_t len) {
        for (std::size_t m = 0; m < d; ++m) {
            if (g.phase[m] == Complex(1, 0)) {
                continue;
            }
            Complex *p = amps + start + g.offsets[m];
            Complex ph = g.phase[m];
            for (std::size_t j = 0; j < len; ++j) {
                p[j] *= ph;
            }
        }
    });
}

void apply_dense(const CompiledGate &g, Complex *amps, int width) {
    std::size_t d = g.offsets.size();
    for_each_run(g.dim, width, g.fixed, [&](std::size_t start, std::size_t len) {
        std::array<Complex, kMaxLocal> tmp;
        for (std::size_t j = 0; j < len; ++j) {
            Complex *p = amps + start + j;
            for (std::size_t m = 0; m < d; ++m) {
                tmp[m] = p[g.offsets[m]];
            }
            for (std::size_t r = 0; r < d; ++r) {
                Complex acc = 0;
                const Complex *row = g.dense.data() + r * d;
                for (std::size_t c = 0; c < d; ++c) {
                    acc += row[c] * tmp[c];
                }
                p[g.offsets[r]] = acc;
            }
        }
    });
}

}  // namespace

CompiledGate compile_gate(const GateInstance &g, int width) {
    CompiledGate out;
    out.dim = g.dim();
    for (const auto &c : g.controls()) {
        out.fixed.push_back({c.qudit, c.level});
    }
    for (int t : g.targets()) {
        out.fixed.push_back({t, 0});
    }
    out.offsets = target_offsets(g.dim(), width, g.targets());
    const auto &base = g.base();
    if (const auto &action = base.classical_action()) {
        out.image = action->image;
        out.phase = action->phase;
        out.kind = base.is_diagonal() ? CompiledGate::Kind::kDiagonal : CompiledGate::Kind::kPermutation;
        out.unit_phases = std::all_of(out.phase.begin(), out.phase.end(), [](Complex c) { return c == Complex(1, 0); });
        return out;
    }
    std::size_t n = base.size();
    out.dense.resize(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            out.dense[r * n + c] = base.matrix()(r, c);
        }
    }
    return out;
}

CompiledGate compile_single_permutation(int dim, int width, int target, std::vector<std::uint32_t> image,
                                        std::vector<Complex> phase) {
    CompiledGate out;
    out.dim = dim;
    out.fixed.push_back({target, 0});
    out.offsets = target_offsets(dim, width, {target});
    bool identity_map = true;
    for (std::size_t m = 0; m < image.size(); ++m) {
        identity_map &= image[m] == m;
    }
    out.kind = identity_map ? CompiledGate::Kind::kDiagonal : CompiledGate::Kind::kPermutation;
    out.unit_phases = std::all_of(phase.begin(), phase.end(), [](Complex c) { return c == Complex(1, 0); });
    out.image = std::move(image);
    out.phase = std::move(phase);
    return out;
}

void apply_compiled(const CompiledGate &g, Complex *amps, int width) {
    switch (g.kind) {
        case CompiledGate::Kind::kDiagonal:
            apply_diagonal(g, amps, width);
            return;
        case CompiledGate::Kind::kPermutation:
            switch (g.offsets.size()) {
                case 2:
                    permute_fixed<2>(g, amps, width);
                    return;
                case 3:
                    permute_fixed<3>(g, amps, width);
                    return;
                case 4:
                    permute_fixed<4>(g, amps, width);
                    return;
                case 9:
                    permute_fixed<9>(g, amps, width);
                    return;
                default:
                    permute_generic(g, amps, width);
                    return;
            }
        case CompiledGate::Kind::kDense:
            apply_dense(g, amps, width);
            return;
    }
}

}  // namespace quditsim::detail
