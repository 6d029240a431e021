#include "systolic/intgcd.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>

namespace systolic::intgcd {

using engine::Bit;
using engine::CellId;
using engine::PortMap;
using engine::PortRef;
using engine::PortValue;

namespace {

const std::vector<std::string> kIn{"ain", "bin", "startin", "startoddin", "epsin", "negin"};
const std::vector<std::string> kOut{"aout", "bout", "startout", "startoddout", "epsout", "negout"};
const std::vector<std::string> kState{"a", "b", "start", "startodd", "eps", "neg",
                                      "wait", "shift", "carry", "swap", "eps2", "minus"};

bool majority(bool x, bool y, bool z) { return (x + y + z) >= 2; }

void check_pm_args(std::int64_t a, std::int64_t b) {
    if (a % 2 == 0) throw PreconditionError("a must be odd");
    if (b == 0) throw PreconditionError("b must be nonzero");
}

engine::CellProgram int_program() {
    auto schema = std::make_shared<engine::PortSchema>(engine::PortSchema{kIn, kOut, kState});
    std::vector<PortValue> init(kState.size(), Bit{});
    auto step = [](const engine::CellContext&, std::span<PortValue> st, std::span<const PortValue> in,
                   std::span<PortValue> out) {
        GcdCellState s;
        bool* regs[] = {&s.a, &s.b, &s.start, &s.startodd, &s.eps, &s.neg,
                        &s.wait, &s.shift, &s.carry, &s.swap, &s.eps2, &s.minus};
        for (std::size_t i = 0; i < 12; ++i) *regs[i] = engine::as_bit(st[i]);
        GcdBits x{engine::as_bit(in[0]), engine::as_bit(in[1]), engine::as_bit(in[2]),
                  engine::as_bit(in[3]), engine::as_bit(in[4]), engine::as_bit(in[5])};
        auto [ns, o] = gcd_cell_step(s, x);
        const bool nregs[] = {ns.a, ns.b, ns.start, ns.startodd, ns.eps, ns.neg,
                              ns.wait, ns.shift, ns.carry, ns.swap, ns.eps2, ns.minus};
        for (std::size_t i = 0; i < 12; ++i) st[i] = Bit{nregs[i]};
        out[0] = Bit{o.a}; out[1] = Bit{o.b}; out[2] = Bit{o.start};
        out[3] = Bit{o.startodd}; out[4] = Bit{o.eps}; out[5] = Bit{o.neg};
    };
    return {schema, init, step};
}

}  // namespace

PrecursorResult pm_precursor(std::int64_t a, std::int64_t b, int n) {
    check_pm_args(a, b);
    if (n < 0 || n > 61) throw PreconditionError("bit bound out of range");
    const std::int64_t bound = std::int64_t{1} << n;
    if (std::llabs(a) > bound || std::llabs(b) > bound) throw PreconditionError("|a| or |b| exceeds 2^n");
    std::int64_t alpha = n, beta = n;
    PrecursorResult r;
    do {
        while (b % 2 == 0) {
            b /= 2;
            --beta;
        }
        if (alpha >= beta) {
            std::swap(a, b);
            std::swap(alpha, beta);
        }
        if ((a + b) % 4 == 0) b = (a + b) / 2;
        else b = (a - b) / 2;
        ++r.iterations;
    } while (b != 0);
    r.g = std::llabs(a);
    return r;
}

std::int64_t pm_serial(std::int64_t a, std::int64_t b, std::vector<PMStep>* steps) {
    check_pm_args(a, b);
    std::int64_t delta = 0;
    do {
        while (b % 2 == 0) {
            b /= 2;
            ++delta;
        }
        if (delta >= 0) {
            std::swap(a, b);
            delta = -delta;
        }
        if ((a + b) % 4 == 0) b = (a + b) / 2;
        else b = (a - b) / 2;
        if (steps) steps->push_back({a, b, delta});
    } while (b != 0);
    return std::llabs(a);
}

BitFrame encode_bitframe(std::uint64_t a, std::uint64_t b, int length) {
    if (length < 2) throw PreconditionError("frame length too short");
    // both values must fit with a zero sign bit
    if (bit_length(a) > length - 1 || bit_length(b) > length - 1)
        throw PreconditionError("value does not fit in frame");
    BitFrame f;
    f.length = length;
    for (int j = 0; j < length; ++j) {
        f.a.push_back(j < 64 && ((a >> j) & 1u));
        f.b.push_back(j < 64 && ((b >> j) & 1u));
        f.start.push_back(j == 0);
        f.startodd.push_back(false);
        f.eps.push_back(false);
        f.neg.push_back(false);
    }
    return f;
}

std::uint64_t decode_magnitude(const std::vector<bool>& bits) {
    std::vector<bool> mag = bits;
    if (!mag.empty() && mag.back()) {
        // two's complement negation: invert and add one
        bool carry = true;
        for (std::size_t j = 0; j < mag.size(); ++j) {
            bool v = !mag[j];
            mag[j] = v != carry;
            carry = v && carry;
        }
    }
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < mag.size(); ++j) {
        if (!mag[j]) continue;
        if (j >= 64) throw engine::SimulationError("decoded magnitude exceeds 64 bits");
        v |= std::uint64_t{1} << j;
    }
    return v;
}

std::pair<GcdCellState, GcdBits> gcd_cell_step(GcdCellState c, const GcdBits& in) {
    GcdBits o;
    o.a = c.a; c.a = in.a;
    o.b = c.b; c.b = in.b;
    o.start = c.start; c.start = in.start;
    o.startodd = c.startodd; c.startodd = in.startodd;
    o.eps = c.eps2; c.eps2 = c.eps; c.eps = in.eps;
    o.neg = c.neg;
    c.wait = (c.wait || c.start) && !c.startodd;
    if (c.startodd || (c.wait && (c.a || c.b))) {
        // two least significant bits available: choose shift and swap
        c.eps = c.eps || c.wait;
        c.eps2 = false;
        c.neg = in.neg && !c.wait;
        c.startodd = true;
        c.wait = false;
        c.swap = !c.a;
        c.shift = !(c.a && c.b);
    } else if (c.wait) {
        o.eps = c.eps2;
    } else if (c.shift) {
        const bool oa = o.a, ob = o.b, oeps = o.eps;
        o.a = (ob && c.swap) || (oa && !c.swap);
        o.b = (c.a && c.swap) || (c.b && !c.swap);
        o.eps = (c.eps && c.neg) || (oeps && !c.neg);
        c.neg = c.neg && !(c.eps && o.startodd);
        o.neg = c.neg;
    } else if (o.startodd) {
        o.eps = c.eps2;
        c.swap = !c.neg;
        c.neg = c.neg || !c.eps2;
        o.neg = c.neg;
        o.a = o.a || c.swap;
        o.b = false;
        c.carry = c.a != c.b;
        c.minus = !c.carry;
    } else {
        o.eps = c.eps2;
        const bool oa = o.a, ob = o.b;
        o.a = (ob && c.swap) || (oa && !c.swap);
        o.b = (c.a != c.b) != c.carry;
        c.carry = majority(c.b, c.carry, c.a != c.minus);
    }
    return {c, o};
}

int pipeline_cells(int n, bool four_n) {
    if (n < 1) throw PreconditionError("bit bound must be positive");
    if (four_n) return 4 * n;
    // ceil(3.1106 n) in integer arithmetic
    const std::int64_t num = 31106LL * n;
    return static_cast<int>((num + 9999) / 10000) + 1;
}

engine::Array build_int_array(int cells, engine::TraceOptions trace) {
    if (cells < 1) throw PreconditionError("array needs at least one cell");
    engine::ArraySpec spec;
    spec.topology = engine::Topology::linear(cells);
    for (int k = 0; k + 1 < cells; ++k)
        for (std::size_t i = 0; i < kIn.size(); ++i)
            spec.wiring.push_back({PortRef{CellId{0, k}, kOut[i]}, PortRef{CellId{0, k + 1}, kIn[i]}});
    std::map<CellId, engine::CellProgram> programs;
    for (int k = 0; k < cells; ++k) programs[CellId{0, k}] = int_program();
    return engine::Array(std::move(spec), std::move(programs), trace);
}

int bit_length(std::uint64_t v) { return v == 0 ? 0 : 64 - std::countl_zero(v); }

IntGcdResult systolic_int_gcd(std::uint64_t a, std::uint64_t b, int n, const RunOptions& opts) {
    if (a == 0 || b == 0) throw PreconditionError("inputs must be positive");
    if (n < 1 || n > 64) throw PreconditionError("bit bound must be in 1..64");
    if (bit_length(a) > n || bit_length(b) > n) throw PreconditionError("inputs must be below 2^n");

    const int e = std::min(std::countr_zero(a), std::countr_zero(b));
    a >>= e;
    b >>= e;
    if (a % 2 == 0) std::swap(a, b);

    const int L = n + 2;
    const int cells = pipeline_cells(n, opts.four_n_cells);
    const auto frame = encode_bitframe(a, b, L);
    const std::int64_t n_ticks = 2LL * cells + L + 1;

    engine::InputSchedule inputs;
    const CellId first{0, 0};
    for (std::int64_t t = 0; t < n_ticks; ++t) {
        PortMap m;
        const bool in_frame = t < L;
        const auto j = static_cast<std::size_t>(t);
        m[PortRef{first, "ain"}] = Bit{in_frame && frame.a[j]};
        m[PortRef{first, "bin"}] = Bit{in_frame && frame.b[j]};
        m[PortRef{first, "startin"}] = Bit{in_frame && frame.start[j]};
        m[PortRef{first, "startoddin"}] = Bit{false};
        m[PortRef{first, "epsin"}] = Bit{false};
        m[PortRef{first, "negin"}] = Bit{false};
        inputs[t] = std::move(m);
    }

    auto array = build_int_array(cells, {opts.trace, opts.trace_stride});
    auto run = engine::run(array, inputs, n_ticks);
    const CellId last{0, cells - 1};
    auto bit_at = [&](std::int64_t t, const char* port) {
        auto it = run.outputs.find(t);
        if (it == run.outputs.end()) return false;
        auto jt = it->second.find(PortRef{last, port});
        return jt != it->second.end() && engine::as_bit(jt->second);
    };
    std::int64_t s = -1;
    for (std::int64_t t = 0; t <= n_ticks; ++t)
        if (bit_at(t, "startout")) { s = t; break; }
    if (s < 0 || s + L - 1 > n_ticks) throw engine::SimulationError("result word did not emerge");
    std::vector<bool> word;
    for (int j = 0; j < L; ++j) word.push_back(bit_at(s + j, "aout"));

    IntGcdResult r;
    r.g = decode_magnitude(word) << e;
    r.cells = cells;
    r.ticks = n_ticks;
    r.trace = std::move(run.trace);
    return r;
}

}  // namespace systolic::intgcd
