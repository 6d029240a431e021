#include "systolic/toeplitz.hpp"

#include <memory>

namespace systolic::toeplitz {

using engine::CellId;
using engine::PortMap;
using engine::PortRef;
using engine::PortValue;

namespace {

const std::vector<std::string> kIn{"inL1", "inL2", "inR1", "inR2", "inR3"};
const std::vector<std::string> kOut{"outL1", "outL2", "outL3", "outR1", "outR2"};
const std::vector<std::string> kState{"alpha", "beta", "gamma", "delta", "lambda", "mu", "xi", "eta"};

void check_pivot(double v, double tol, const char* what) {
    if (std::abs(v) <= tol) throw SingularMinorError(std::string("singular leading minor: ") + what);
}

}  // namespace

bool phase1_active(int k, int n, std::int64_t T) {
    return (T + k) % 2 == 0 && k <= T && T < 2 * n - k;
}

bool phase2_active(int k, int n, std::int64_t T) {
    return (T + k) % 2 == 0 && 2 * n + k <= T && T <= 4 * n - k;
}

ToeplitzStep toeplitz_cell_step(int k, int n, std::int64_t T, ToeplitzCellState c, const ToeplitzIn& in,
                                const ToeplitzOut& prev_out, double tol) {
    ToeplitzStep r;
    r.out = prev_out;
    int mults = 0;
    if (phase1_active(k, n, T)) {
        // LU factorisation
        if (T > k) {
            c.alpha = in.inR1;
            c.delta = in.inR2;
            c.xi = in.inR3;
        }
        if (k == 0) {
            check_pivot(c.gamma, tol, "a_0");
            c.lambda = c.alpha / c.gamma;
        } else {
            c.lambda = in.inL1;
            c.mu = in.inL2;
            c.alpha = c.alpha - c.lambda * c.gamma;
            ++mults;
        }
        c.beta = c.beta - c.lambda * c.delta;
        c.eta = c.eta - c.lambda * c.xi;
        mults += 2;
        if (k == 0) {
            check_pivot(c.beta, tol, "pivot of A^(-k)");
            c.mu = c.delta / c.beta;
        } else {
            c.gamma = c.gamma - c.mu * c.alpha;
            c.delta = c.delta - c.mu * c.beta;
            c.xi = c.xi - c.mu * c.eta;
            mults += 3;
        }
        r.out = {c.alpha, c.delta, c.xi, c.lambda, c.mu};
        r.active = true;
    } else if (phase2_active(k, n, T)) {
        // back substitution
        if (T > 2 * n + k) {
            c.lambda = in.inR1;
            c.mu = in.inR2;
            c.eta = in.inR3;
        }
        if (k == 0) {
            check_pivot(c.beta, tol, "regenerated diagonal");
            c.xi = c.eta / c.beta;
            c.delta = c.mu * c.beta;
            ++mults;
        } else {
            c.xi = in.inL1;
            c.delta = in.inL2;
            c.eta = c.eta - c.beta * c.xi;
            c.delta = c.delta + c.mu * c.beta;
            mults += 2;
        }
        c.beta = c.beta + c.lambda * c.delta;
        ++mults;
        r.out = {c.lambda, c.mu, c.eta, c.xi, c.delta};
        r.active = true;
    }
    r.state = c;
    r.multiplications = mults;
    return r;
}

ToeplitzCellState initial_cell_state(const ToeplitzBands& T, int k) {
    ToeplitzCellState s;
    s.alpha = T.a(-(k + 1));
    s.beta = T.a(k);
    s.gamma = T.a(-k);
    s.delta = T.a(k + 1);
    s.lambda = s.mu = 0;
    s.xi = T.b(T.n - k - 1);
    s.eta = T.b(T.n - k);
    return s;
}

SystolicResult systolic_toeplitz_solve(const ToeplitzBands& T, const SystolicOptions& opts) {
    const int n = T.n;
    const double tol = T.pivot_tolerance();
    struct Counters {
        std::int64_t mults = 0;
        std::int64_t last_active = -1;
    };
    auto counters = std::make_shared<Counters>();

    engine::ArraySpec spec;
    spec.topology = engine::Topology::linear(n + 1);
    for (int k = 0; k < n; ++k) {
        // leftward: alpha, delta, xi; rightward: lambda, mu (phase 2: xi, delta)
        spec.wiring.push_back({PortRef{CellId{0, k + 1}, "outL1"}, PortRef{CellId{0, k}, "inR1"}});
        spec.wiring.push_back({PortRef{CellId{0, k + 1}, "outL2"}, PortRef{CellId{0, k}, "inR2"}});
        spec.wiring.push_back({PortRef{CellId{0, k + 1}, "outL3"}, PortRef{CellId{0, k}, "inR3"}});
        spec.wiring.push_back({PortRef{CellId{0, k}, "outR1"}, PortRef{CellId{0, k + 1}, "inL1"}});
        spec.wiring.push_back({PortRef{CellId{0, k}, "outR2"}, PortRef{CellId{0, k + 1}, "inL2"}});
    }
    spec.activation = [n](CellId id, std::int64_t t) { return phase1_active(id.col, n, t) || phase2_active(id.col, n, t); };

    auto schema = std::make_shared<engine::PortSchema>(engine::PortSchema{kIn, kOut, kState});
    std::map<CellId, engine::CellProgram> programs;
    for (int k = 0; k <= n; ++k) {
        auto s0 = initial_cell_state(T, k);
        std::vector<PortValue> init{s0.alpha, s0.beta, s0.gamma, s0.delta, s0.lambda, s0.mu, s0.xi, s0.eta};
        auto step = [n, tol, counters](const engine::CellContext& ctx, std::span<PortValue> st,
                                    std::span<const PortValue> in, std::span<PortValue> out) {
            using engine::as_real;
            ToeplitzCellState c{as_real(st[0]), as_real(st[1]), as_real(st[2]), as_real(st[3]),
                                as_real(st[4]), as_real(st[5]), as_real(st[6]), as_real(st[7])};
            ToeplitzIn x{as_real(in[0]), as_real(in[1]), as_real(in[2]), as_real(in[3]), as_real(in[4])};
            ToeplitzOut prev{as_real(out[0]), as_real(out[1]), as_real(out[2]), as_real(out[3]), as_real(out[4])};
            auto r = toeplitz_cell_step(ctx.cell.col, n, ctx.tick, c, x, prev, tol);
            counters->mults += r.multiplications;
            if (r.active) counters->last_active = std::max(counters->last_active, ctx.tick);
            const auto& s = r.state;
            st[0] = s.alpha; st[1] = s.beta; st[2] = s.gamma; st[3] = s.delta;
            st[4] = s.lambda; st[5] = s.mu; st[6] = s.xi; st[7] = s.eta;
            out[0] = r.out.outL1; out[1] = r.out.outL2; out[2] = r.out.outL3;
            out[3] = r.out.outR1; out[4] = r.out.outR2;
        };
        programs[CellId{0, k}] = engine::CellProgram{schema, init, step};
    }

    engine::Array array(std::move(spec), std::move(programs), {opts.trace, opts.trace_stride});
    const std::int64_t n_ticks = 4LL * n + 1;
    engine::InputSchedule inputs;
    for (std::int64_t t = 0; t < n_ticks; ++t) {
        PortMap m;
        m[PortRef{CellId{0, 0}, "inL1"}] = 0.0;
        m[PortRef{CellId{0, 0}, "inL2"}] = 0.0;
        m[PortRef{CellId{0, n}, "inR1"}] = 0.0;
        m[PortRef{CellId{0, n}, "inR2"}] = 0.0;
        m[PortRef{CellId{0, n}, "inR3"}] = 0.0;
        inputs[t] = std::move(m);
    }
    auto run = engine::run(array, inputs, n_ticks);

    SystolicResult r;
    r.ticks = n_ticks;
    r.multiplications = counters->mults;
    r.completion_tick = counters->last_active;
    r.registers_per_cell = kState.size();
    for (int k = 0; k <= n; ++k) r.x.push_back(engine::as_real(array.state(CellId{0, k})[6]));
    r.trace = std::move(run.trace);
    return r;
}

}  // namespace systolic::toeplitz
