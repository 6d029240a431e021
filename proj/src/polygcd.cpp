#include "systolic/polygcd.hpp"

#include <algorithm>

namespace systolic::polygcd {

using engine::Bit;
using engine::CellId;
using engine::PortMap;
using engine::PortRef;
using engine::PortValue;

namespace {

FieldElement coeff_from_top(const FieldPoly& P, int slot) {
    // slot 0 holds the leading coefficient
    return P.coeff(P.degree() - slot);
}

const std::vector<std::string> kFig4In{"ain", "bin", "startin", "din"};
const std::vector<std::string> kFig4Out{"aout", "bout", "startout", "dout"};
const std::vector<std::string> kAppAIn{"ain", "bin", "startin", "stopin", "sigin"};
const std::vector<std::string> kAppAOut{"aout", "bout", "startout", "stopout", "sigout"};

engine::CellProgram fig4_program(std::uint32_t p) {
    auto schema = std::make_shared<engine::PortSchema>(
        engine::PortSchema{kFig4In, kFig4Out, {"a", "b", "q", "d", "start", "state"}});
    auto r = fig4_reset(p);
    std::vector<PortValue> init{r.a, r.b, r.q, r.d, Bit{r.start}, static_cast<std::int64_t>(r.state)};
    auto step = [p](const engine::CellContext&, std::span<PortValue> st, std::span<const PortValue> in,
                    std::span<PortValue> out) {
        PolyCellStateFig4 s;
        s.a = engine::as_field(st[0], p);
        s.b = engine::as_field(st[1], p);
        s.q = engine::as_field(st[2], p);
        s.d = engine::as_int(st[3]);
        s.start = engine::as_bit(st[4]);
        s.state = static_cast<Fig4Mode>(engine::as_int(st[5]));
        Fig4Ports x{engine::as_field(in[0], p), engine::as_field(in[1], p), engine::as_bit(in[2]), engine::as_int(in[3])};
        auto [ns, o] = fig4_cell_step(s, x);
        st[0] = ns.a; st[1] = ns.b; st[2] = ns.q; st[3] = ns.d;
        st[4] = Bit{ns.start}; st[5] = static_cast<std::int64_t>(ns.state);
        out[0] = o.a; out[1] = o.b; out[2] = Bit{o.start}; out[3] = o.d;
    };
    return {schema, init, step};
}

engine::CellProgram appA_program(std::uint32_t p) {
    auto schema = std::make_shared<engine::PortSchema>(
        engine::PortSchema{kAppAIn, kAppAOut, {"a", "b", "q", "start", "stop", "sig", "state"}});
    auto r = appA_reset(p);
    std::vector<PortValue> init{r.a, r.b, r.q, Bit{}, Bit{}, Bit{}, static_cast<std::int64_t>(r.state)};
    auto step = [p](const engine::CellContext&, std::span<PortValue> st, std::span<const PortValue> in,
                    std::span<PortValue> out) {
        PolyCellStateAppA s;
        s.a = engine::as_field(st[0], p);
        s.b = engine::as_field(st[1], p);
        s.q = engine::as_field(st[2], p);
        s.start = engine::as_bit(st[3]);
        s.stop = engine::as_bit(st[4]);
        s.sig = engine::as_bit(st[5]);
        s.state = static_cast<AppAMode>(engine::as_int(st[6]));
        AppAPorts x{engine::as_field(in[0], p), engine::as_field(in[1], p), engine::as_bit(in[2]),
                    engine::as_bit(in[3]), engine::as_bit(in[4])};
        auto [ns, o] = appA_cell_step(s, x);
        st[0] = ns.a; st[1] = ns.b; st[2] = ns.q;
        st[3] = Bit{ns.start}; st[4] = Bit{ns.stop}; st[5] = Bit{ns.sig};
        st[6] = static_cast<std::int64_t>(ns.state);
        out[0] = o.a; out[1] = o.b; out[2] = Bit{o.start}; out[3] = Bit{o.stop}; out[4] = Bit{o.sig};
    };
    return {schema, init, step};
}

// A pair after the host has removed the common power of x.
struct Prepared {
    FieldPoly A, B;
    int e = 0;
};

Prepared prepare(const FieldPoly& A, const FieldPoly& B) {
    if (A.modulus() != B.modulus()) throw EncodeError("polynomials over different fields");
    if (A.is_zero() && B.is_zero()) throw EncodeError("both polynomials are zero");
    int e;
    if (A.is_zero()) e = B.x_valuation();
    else if (B.is_zero()) e = A.x_valuation();
    else e = std::min(A.x_valuation(), B.x_valuation());
    return {A.shift_down(e), B.shift_down(e), e};
}

FieldPoly finish(std::vector<FieldElement> high_first, std::uint32_t p, int e) {
    std::reverse(high_first.begin(), high_first.end());
    return FieldPoly(std::move(high_first), p).monic().shift_up(e);
}

struct Scheduled {
    std::int64_t t0 = 0;  // tick at which slot 0 enters cell 0
    std::size_t length = 0;
    int e = 0;
};

void put(PortMap& m, const char* port, PortValue v) { m[PortRef{CellId{0, 0}, port}] = std::move(v); }

const PortValue& out_at(const engine::OutputSchedule& outs, std::int64_t tick, CellId cell, const char* port) {
    static const PortValue empty{};
    auto it = outs.find(tick);
    if (it == outs.end()) return empty;
    auto jt = it->second.find(PortRef{cell, port});
    return jt == it->second.end() ? empty : jt->second;
}

}  // namespace

PolyStreamFrame encode_frame(const FieldPoly& A0, const FieldPoly& B0, Variant variant) {
    if (A0.modulus() != B0.modulus()) throw EncodeError("polynomials over different fields");
    if (A0.is_zero() && B0.is_zero()) throw EncodeError("both polynomials are zero");
    const auto p = A0.modulus();
    PolyStreamFrame f;
    f.variant = variant;
    f.modulus = p;
    FieldPoly A = A0, B = B0;
    if (variant == Variant::appA && B.degree() > A.degree()) {
        std::swap(A, B);
        f.swapped = true;
    }
    const int n = A.degree(), m = B.degree();
    const int len = variant == Variant::fig4 ? std::max(n, m) + 1 : n + 2;
    for (int s = 0; s < len; ++s) {
        f.a.push_back(s <= n ? coeff_from_top(A, s) : FieldElement(0, p));
        f.b.push_back(s <= m ? coeff_from_top(B, s) : FieldElement(0, p));
        f.start.push_back(s == 0);
        if (variant == Variant::fig4) {
            f.d.push_back(s == 0 ? n - m : 0);
        } else {
            f.stop.push_back(s == n + 1);
            f.sig.push_back(!B.is_zero() && s == n - m);
        }
    }
    return f;
}

PolyCellStateFig4 fig4_reset(std::uint32_t p) {
    PolyCellStateFig4 s;
    s.a = s.b = s.q = FieldElement(0, p);
    return s;
}

std::pair<PolyCellStateFig4, Fig4Ports> fig4_cell_step(PolyCellStateFig4 s, const Fig4Ports& in) {
    const auto zero = FieldElement(0, in.a.modulus());
    Fig4Ports out;
    out.d = s.d;
    out.start = s.start;
    switch (s.state) {
    case Fig4Mode::initial:
        out.a = s.a;
        out.b = s.b;
        if (s.start) {
            if (in.a.is_zero() || (!in.b.is_zero() && in.d >= 0)) {
                s.state = Fig4Mode::reduceA;
                s.q = in.b.is_zero() ? zero : gf::field_div(in.a, in.b);
                s.a = zero;
                s.b = in.b;
                s.d = in.d - 1;
            } else {
                s.state = Fig4Mode::reduceB;
                s.q = gf::field_div(in.b, in.a);
                s.b = zero;
                s.a = in.a;
                s.d = in.d + 1;
            }
        }
        break;
    case Fig4Mode::reduceA:
        if (in.start) s.state = Fig4Mode::initial;
        out.a = in.a - s.q * in.b;
        out.b = s.b;
        s.b = in.b;
        s.d = in.d;
        break;
    case Fig4Mode::reduceB:
        if (in.start) s.state = Fig4Mode::initial;
        out.a = s.a;
        s.a = in.a;
        out.b = in.b - s.q * in.a;
        s.d = in.d;
        break;
    }
    s.start = in.start;
    return {s, out};
}

PolyCellStateAppA appA_reset(std::uint32_t p) {
    PolyCellStateAppA s;
    s.a = s.b = s.q = FieldElement(0, p);
    return s;
}

std::pair<PolyCellStateAppA, AppAPorts> appA_cell_step(PolyCellStateAppA s, const AppAPorts& in) {
    const auto zero = FieldElement(0, in.a.modulus());
    AppAPorts out;
    // standard transfers
    out.a = s.a; s.a = in.a;
    out.b = s.b; s.b = in.b;
    out.start = s.start; s.start = in.start;
    out.stop = s.stop; s.stop = in.stop;
    out.sig = s.sig; s.sig = in.sig;
    switch (s.state) {
    case AppAMode::initial:
        if (s.start && !s.stop) {
            if (s.b.is_zero()) {
                s.state = AppAMode::shift;
            } else {
                s.q = gf::field_div(s.a, s.b);
                if (s.sig) {
                    s.state = AppAMode::swap;
                    s.a = s.b;
                    s.sig = false;
                } else {
                    s.state = AppAMode::trans;
                }
            }
        }
        break;
    case AppAMode::shift:
        out.b = s.b;
        s.b = zero;
        if (s.stop) s.state = AppAMode::initial;
        break;
    case AppAMode::swap:
        out.b = s.a - s.q * s.b;
        s.a = s.b;
        s.b = zero;
        s.sig = !out.b.is_zero();
        if (s.stop) s.state = AppAMode::initial;
        break;
    case AppAMode::trans:
        out.a = s.a - s.q * s.b;
        s.a = zero;
        if (s.stop) s.state = AppAMode::initial;
        out.stop = s.stop;
        s.stop = false;
        out.sig = s.sig;
        s.sig = false;
        break;
    }
    return {s, out};
}

engine::Array build_poly_array(Variant variant, std::uint32_t p, int cells, engine::TraceOptions trace) {
    gf::PrimeField check(p);
    if (cells < 1) throw EncodeError("array needs at least one cell");
    engine::ArraySpec spec;
    spec.topology = engine::Topology::linear(cells);
    const auto& ins = variant == Variant::fig4 ? kFig4In : kAppAIn;
    const auto& outs = variant == Variant::fig4 ? kFig4Out : kAppAOut;
    for (int k = 0; k + 1 < cells; ++k)
        for (std::size_t i = 0; i < ins.size(); ++i)
            spec.wiring.push_back({PortRef{CellId{0, k}, outs[i]}, PortRef{CellId{0, k + 1}, ins[i]}});
    std::map<CellId, engine::CellProgram> programs;
    for (int k = 0; k < cells; ++k)
        programs[CellId{0, k}] = variant == Variant::fig4 ? fig4_program(p) : appA_program(p);
    return engine::Array(std::move(spec), std::move(programs), trace);
}

int cells_for(const FieldPoly& A, const FieldPoly& B) {
    return std::max(A.degree(), 0) + std::max(B.degree(), 0) + 1;
}

BatchResult pipeline_batch(const std::vector<std::pair<FieldPoly, FieldPoly>>& pairs, Variant variant,
                           const RunOptions& opts) {
    BatchResult result;
    if (pairs.empty()) return result;
    const auto p = pairs.front().first.modulus();

    std::vector<PolyStreamFrame> frames;
    std::vector<Scheduled> sched;
    int cells = 1;
    // fig4 frames need their start bit one tick ahead of slot 0.
    std::int64_t t = variant == Variant::fig4 ? 1 : 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto prep = prepare(pairs[i].first, pairs[i].second);
        if (prep.A.modulus() != p) throw EncodeError("batch mixes fields");
        auto f = encode_frame(prep.A, prep.B, variant);
        cells = std::max(cells, cells_for(prep.A, prep.B));
        std::size_t len = f.length();
        // a one-slot fig4 frame would leave no slot to carry the next start bit
        if (variant == Variant::fig4 && i + 1 < pairs.size() && len < 2) len = 2;
        sched.push_back({t, len, prep.e});
        frames.push_back(std::move(f));
        t += static_cast<std::int64_t>(len);
    }
    const std::int64_t input_end = t;
    const std::int64_t n_ticks = input_end + 2 * cells + 2;

    const auto zero = FieldElement(0, p);
    engine::InputSchedule inputs;
    for (std::int64_t k = 0; k < n_ticks; ++k) {
        PortMap m;
        put(m, "ain", zero);
        put(m, "bin", zero);
        put(m, "startin", Bit{});
        if (variant == Variant::fig4) put(m, "din", std::int64_t{0});
        else { put(m, "stopin", Bit{}); put(m, "sigin", Bit{}); }
        inputs[k] = std::move(m);
    }
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& f = frames[i];
        const auto t0 = sched[i].t0;
        for (std::size_t s = 0; s < f.length(); ++s) {
            auto& m = inputs[t0 + static_cast<std::int64_t>(s)];
            put(m, "ain", f.a[s]);
            put(m, "bin", f.b[s]);
            if (variant == Variant::fig4) {
                put(m, "din", f.d[s]);
            } else {
                put(m, "startin", Bit{f.start[s]});
                put(m, "stopin", Bit{f.stop[s]});
                put(m, "sigin", Bit{f.sig[s]});
            }
        }
        if (variant == Variant::fig4) put(inputs[t0 - 1], "startin", Bit{true});
    }

    auto array = build_poly_array(variant, p, cells, {opts.trace, opts.trace_stride});
    auto run = engine::run(array, inputs, n_ticks);
    const CellId last{0, cells - 1};

    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto t0 = sched[i].t0;
        const auto first = t0 + 2 * static_cast<std::int64_t>(cells);
        std::vector<FieldElement> line;
        std::int64_t lead_tick = -1;
        if (variant == Variant::fig4) {
            std::vector<FieldElement> la, lb;
            for (std::size_t s = 0; s < sched[i].length; ++s) {
                auto tk = first + static_cast<std::int64_t>(s);
                la.push_back(engine::as_field(out_at(run.outputs, tk, last, "aout"), p));
                lb.push_back(engine::as_field(out_at(run.outputs, tk, last, "bout"), p));
            }
            bool use_a = std::any_of(la.begin(), la.end(), [](auto x) { return !x.is_zero(); });
            line = use_a ? la : lb;
        } else {
            if (!engine::as_bit(out_at(run.outputs, first, last, "startout")))
                throw engine::SimulationError("start marker missing from array output");
            std::int64_t tk = first;
            while (tk < n_ticks + 1 && (tk == first || !engine::as_bit(out_at(run.outputs, tk, last, "stopout")))) {
                line.push_back(engine::as_field(out_at(run.outputs, tk, last, "aout"), p));
                ++tk;
            }
        }
        // strip leading zeros, then trailing zeros past the constant term
        std::size_t lo = 0;
        while (lo < line.size() && line[lo].is_zero()) ++lo;
        std::size_t hi = line.size();
        while (hi > lo && line[hi - 1].is_zero()) --hi;
        if (lo == hi) throw engine::SimulationError("no GCD coefficients emerged");
        lead_tick = first + static_cast<std::int64_t>(lo);
        PolyGcdResult r;
        r.g = finish(std::vector<FieldElement>(line.begin() + static_cast<std::ptrdiff_t>(lo),
                                               line.begin() + static_cast<std::ptrdiff_t>(hi)),
                     p, sched[i].e);
        r.latency = lead_tick - t0;
        r.cells = cells;
        r.ticks = n_ticks;
        result.results.push_back(std::move(r));
    }
    result.cells = cells;
    result.ticks = n_ticks;
    result.trace = std::move(run.trace);
    return result;
}

PolyGcdResult systolic_poly_gcd(const FieldPoly& A, const FieldPoly& B, Variant variant, const RunOptions& opts) {
    auto batch = pipeline_batch({{A, B}}, variant, opts);
    auto r = std::move(batch.results.front());
    r.trace = std::move(batch.trace);
    return r;
}

FieldPoly apply_RA(const FieldPoly& A, const FieldPoly& B) {
    if (B.is_zero() || A.degree() < B.degree()) throw EncodeError("R_A needs deg A >= deg B >= 0");
    auto q = gf::field_div(A.lead(), B.lead());
    return A - gf::scale(B.shift_up(A.degree() - B.degree()), q);
}

std::vector<Transformation> transformation_sequence(const FieldPoly& A0, const FieldPoly& B0) {
    std::vector<Transformation> seq;
    FieldPoly A = A0, B = B0;
    while (!A.is_zero() && !B.is_zero()) {
        Transformation t;
        int before = A.degree() + B.degree();
        if (A.degree() >= B.degree()) {
            t.on_a = true;
            t.q = gf::field_div(A.lead(), B.lead());
            t.shift = A.degree() - B.degree();
            A = apply_RA(A, B);
        } else {
            t.on_a = false;
            t.q = gf::field_div(B.lead(), A.lead());
            t.shift = B.degree() - A.degree();
            B = apply_RA(B, A);
        }
        t.reduction = before - (A.degree() + B.degree());
        t.A = A;
        t.B = B;
        seq.push_back(std::move(t));
    }
    return seq;
}

}  // namespace systolic::polygcd
