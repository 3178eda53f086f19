#pragma once

// Strided gate kernels shared by the state-vector engine and the trajectory
// runner.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "quditsim/gates.h"

namespace quditsim::detail {

inline std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

struct FixedDigit {
    int qudit;
    int level;
};

/// Calls fn(start, length) for every maximal contiguous run of indices whose
/// digits at the fixed positions equal the fixed levels.
template <typename Fn>
void for_each_run(int dim, int width, std::vector<FixedDigit> fixed, Fn &&fn) {
    std::sort(fixed.begin(), fixed.end(), [](const FixedDigit &a, const FixedDigit &b) { return a.qudit < b.qudit; });
    auto stride = [&](int q) { return ipow(dim, width - 1 - q); };
    std::size_t offset = 0;
    for (const auto &f : fixed) {
        offset += static_cast<std::size_t>(f.level) * stride(f.qudit);
    }
    if (fixed.empty()) {
        fn(std::size_t{0}, ipow(dim, width));
        return;
    }
    // Free digits between consecutive fixed positions form one odometer wheel
    // each; the digits below the last fixed position form the contiguous run.
    struct Wheel {
        std::size_t count;
        std::size_t step;
    };
    std::vector<Wheel> wheels;
    int prev = -1;
    for (const auto &f : fixed) {
        int len = f.qudit - prev - 1;
        if (len > 0) {
            wheels.push_back({ipow(dim, len), stride(f.qudit - 1)});
        }
        prev = f.qudit;
    }
    int n_wheels = static_cast<int>(wheels.size());
    std::size_t run = stride(fixed.back().qudit);
    std::vector<std::size_t> counter(wheels.size(), 0);
    std::size_t base = offset;
    while (true) {
        fn(base, run);
        int w = n_wheels - 1;
        while (w >= 0) {
            if (++counter[w] < wheels[w].count) {
                base += wheels[w].step;
                break;
            }
            base -= (wheels[w].count - 1) * wheels[w].step;
            counter[w] = 0;
            --w;
        }
        if (w < 0) {
            return;
        }
    }
}

/// A controlled gate resolved against a concrete register width.
struct CompiledGate {
    enum class Kind { kPermutation, kDiagonal, kDense };
    Kind kind = Kind::kDense;
    int dim = 0;
    std::vector<FixedDigit> fixed;
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> image;
    std::vector<Complex> phase;
    bool unit_phases = true;
    std::vector<Complex> dense;  // row-major
};

CompiledGate compile_gate(const GateInstance &g, int width);

/// Generalized-permutation gate on a single target given directly by its
/// image and phases.
CompiledGate compile_single_permutation(int dim, int width, int target, std::vector<std::uint32_t> image,
                                        std::vector<Complex> phase);

void apply_compiled(const CompiledGate &g, Complex *amps, int width);

}  // namespace quditsim::detail
