#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "systolic/engine.hpp"

namespace systolic::intgcd {

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PrecursorResult {
    std::int64_t g = 0;
    int iterations = 0;
};

/// Bounded plus-minus loop with explicit bounds alpha, beta (|a| <= 2^alpha, |b| <= 2^beta).
PrecursorResult pm_precursor(std::int64_t a, std::int64_t b, int n);

/// One pass of the Algorithm PM repeat loop, as observed after the update.
struct PMStep {
    std::int64_t a = 0, b = 0, delta = 0;
};

/// Algorithm PM with the swap taken when delta >= 0. `steps`, when given,
/// receives the state after every loop iteration.
std::int64_t pm_serial(std::int64_t a, std::int64_t b, std::vector<PMStep>* steps = nullptr);

/// Six 1-bit streams of one word, least significant bit first.
struct BitFrame {
    int length = 0;
    std::vector<bool> a, b, start, startodd, eps, neg;
};

/// Encodes two non-negative values as L-bit 2's-complement lanes.
BitFrame encode_bitframe(std::uint64_t a, std::uint64_t b, int length);

/// Magnitude of an L-bit 2's-complement word given LSB first.
std::uint64_t decode_magnitude(const std::vector<bool>& bits);

struct GcdCellState {
    bool a = false, b = false, start = false, startodd = false, eps = false, neg = false;
    bool wait = false, shift = false, carry = false, swap = false, eps2 = false, minus = false;
};

struct GcdBits {
    bool a = false, b = false, start = false, startodd = false, eps = false, neg = false;
};

std::pair<GcdCellState, GcdBits> gcd_cell_step(GcdCellState s, const GcdBits& in);

/// ceil(3.1106 n) + 1, or 4n when the fallback is requested.
int pipeline_cells(int n, bool four_n = false);

engine::Array build_int_array(int cells, engine::TraceOptions trace = {false, 1});

struct RunOptions {
    bool trace = false;
    int trace_stride = 1;
    bool four_n_cells = false;
};

struct IntGcdResult {
    std::uint64_t g = 0;
    int cells = 0;
    std::int64_t ticks = 0;
    engine::Trace trace;
};

/// gcd(a, b) for 0 < a, b < 2^n, n <= 64, on a pipeline of cells.
IntGcdResult systolic_int_gcd(std::uint64_t a, std::uint64_t b, int n, const RunOptions& opts = {});

/// Bits needed to hold v (0 for v = 0).
int bit_length(std::uint64_t v);

}  // namespace systolic::intgcd
