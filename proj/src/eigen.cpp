#include "systolic/eigen.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>

namespace systolic::eig {

using engine::Bit;
using engine::CellId;
using engine::PortRef;
using engine::PortValue;

Block rotate_block(const Block& b, const RotationPair& ri, const RotationPair& rj) {
    // X = B [c_j s_j; -s_j c_j]
    const double x00 = b.alpha * rj.c - b.beta * rj.s;
    const double x01 = b.alpha * rj.s + b.beta * rj.c;
    const double x10 = b.gamma * rj.c - b.delta * rj.s;
    const double x11 = b.gamma * rj.s + b.delta * rj.c;
    // [c_i -s_i; s_i c_i] X
    return {ri.c * x00 - ri.s * x10, ri.c * x01 - ri.s * x11, ri.s * x00 + ri.c * x10, ri.s * x01 + ri.c * x11};
}

double BlockGrid::element(int p, int q) const {
    const auto& b = at(p / 2, q / 2);
    if (p % 2 == 0) return q % 2 == 0 ? b.alpha : b.beta;
    return q % 2 == 0 ? b.gamma : b.delta;
}

double& BlockGrid::element(int p, int q) {
    auto& b = at(p / 2, q / 2);
    if (p % 2 == 0) return q % 2 == 0 ? b.alpha : b.beta;
    return q % 2 == 0 ? b.gamma : b.delta;
}

BlockGrid BlockGrid::pack(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw InputError("matrix must be square");
    if (A.rows() == 0) throw InputError("matrix must be nonempty");
    BlockGrid g;
    g.n = static_cast<int>(A.rows());
    g.h = (g.n + 1) / 2;
    g.blocks.assign(static_cast<std::size_t>(g.h * g.h), Block{});
    for (int p = 0; p < g.positions(); ++p) {
        g.tracker.push_back(p);
        for (int q = 0; q < g.positions(); ++q)
            g.element(p, q) = p < g.n && q < g.n ? A(p, q) : 0.0;
    }
    return g;
}

Eigen::MatrixXd BlockGrid::to_dense() const {
    Eigen::MatrixXd M(positions(), positions());
    for (int p = 0; p < positions(); ++p)
        for (int q = 0; q < positions(); ++q) M(p, q) = element(p, q);
    return M;
}

double BlockGrid::off_norm() const {
    double s = 0;
    for (int p = 0; p < positions(); ++p)
        for (int q = 0; q < positions(); ++q)
            if (p != q) s += element(p, q) * element(p, q);
    return std::sqrt(s);
}

bool BlockGrid::symmetric(double tol) const {
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < h; ++j) {
            const auto& x = at(i, j);
            const auto& y = at(j, i);
            if (std::abs(x.alpha - y.alpha) > tol || std::abs(x.delta - y.delta) > tol ||
                std::abs(x.beta - y.gamma) > tol)
                return false;
        }
    }
    return true;
}

int permutation_target(int p, int positions) {
    if (p < 1 || p > positions) throw InputError("position out of range");
    if (p == 1 || positions <= 2) return p;
    if (p % 2 == 1) return p + 2 <= positions - 1 ? p + 2 : positions;
    return p == 2 ? 3 : p - 2;
}

BlockGrid permute(const BlockGrid& g) {
    BlockGrid out = g;
    const int N = g.positions();
    std::vector<int> to(static_cast<std::size_t>(N));
    for (int p = 0; p < N; ++p) to[static_cast<std::size_t>(p)] = permutation_target(p + 1, N) - 1;
    for (int p = 0; p < N; ++p) {
        const int pp = to[static_cast<std::size_t>(p)];
        out.tracker[static_cast<std::size_t>(pp)] = g.tracker[static_cast<std::size_t>(p)];
        for (int q = 0; q < N; ++q) out.element(pp, to[static_cast<std::size_t>(q)]) = g.element(p, q);
    }
    return out;
}

std::vector<std::pair<int, int>> diagonal_pairs(const BlockGrid& g) {
    std::vector<std::pair<int, int>> v;
    for (int i = 0; i < g.h; ++i)
        v.emplace_back(g.tracker[static_cast<std::size_t>(2 * i)] + 1, g.tracker[static_cast<std::size_t>(2 * i + 1)] + 1);
    return v;
}

std::pair<RotationPair, bool> diagonal_rotation(const Block& b, double threshold) {
    if (b.beta == 0.0 || std::abs(b.beta) < threshold) return {RotationPair{}, false};
    return {jacobi_rotation(b.alpha, b.beta, b.delta), true};
}

Block rotate_diagonal(const Block& b, const RotationPair& r, bool performed) {
    Block out = rotate_block(b, r, r);
    if (performed) out.beta = out.gamma = 0.0;
    return out;
}

GridStep grid_step(const BlockGrid& g, double threshold) {
    GridStep st;
    BlockGrid rotated = g;
    for (int i = 0; i < g.h; ++i) {
        auto [r, done] = diagonal_rotation(g.at(i, i), threshold);
        st.rotations.push_back(r);
        st.performed.push_back(done);
        if (done) st.annihilated += g.at(i, i).beta * g.at(i, i).beta;
    }
    for (int i = 0; i < g.h; ++i)
        for (int j = 0; j < g.h; ++j)
            rotated.at(i, j) = i == j ? rotate_diagonal(g.at(i, i), st.rotations[static_cast<std::size_t>(i)],
                                                        st.performed[static_cast<std::size_t>(i)])
                                      : rotate_block(g.at(i, j), st.rotations[static_cast<std::size_t>(i)],
                                                     st.rotations[static_cast<std::size_t>(j)]);
    st.grid = permute(rotated);
    return st;
}

double default_threshold(int sweep, double off0, int n) {
    if (sweep >= 6) return 0.0;
    return off0 / (static_cast<double>(n) * n * std::pow(4.0, sweep));
}

int max_dependency_slack(int h) {
    int worst = 0;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j)
            for (int di : {-1, 1})
                for (int dj : {-1, 1}) {
                    int a = i + di, b = j + dj;
                    if (a < 0 || b < 0 || a >= h || b >= h) continue;
                    worst = std::max(worst, std::abs(std::abs(i - j) - std::abs(a - b)));
                }
    return worst;
}

namespace {

std::string eport(char dir, int r, int c, int parity) {
    return std::string(1, dir) + std::to_string(r) + std::to_string(c) + "_" + std::to_string(parity);
}

/// Delayed-mode grid on the engine. Cell (i,j) runs step s at tick 3s+|i-j|.
/// Rotation parameters travel one cell per tick away from the diagonal;
/// rotated elements go to the cell that owns their permuted position through
/// a pair of output registers alternating by step parity.
class DelayedArray {
public:
    DelayedArray(const BlockGrid& g0, int total_steps, std::function<double(int)> threshold,
                 engine::TraceOptions trace)
        : h_(g0.h), total_(total_steps) {
        const int N = g0.positions();
        std::vector<int> from(static_cast<std::size_t>(N));
        for (int p = 0; p < N; ++p) from[static_cast<std::size_t>(permutation_target(p + 1, N) - 1)] = p;

        engine::ArraySpec spec;
        spec.topology = engine::Topology::grid(h_, h_);
        const int h = h_;
        const int total = total_;
        spec.activation = [total](CellId id, std::int64_t t) {
            const int d = std::abs(id.row - id.col);
            return t >= d && (t - d) % 3 == 0 && (t - d) / 3 < total;
        };
        std::map<CellId, engine::CellProgram> programs;
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < h; ++j) {
                auto schema = std::make_shared<engine::PortSchema>();
                for (int par = 0; par < 2; ++par)
                    for (int r = 0; r < 2; ++r)
                        for (int c = 0; c < 2; ++c) {
                            schema->inputs.push_back(eport('e', r, c, par));
                            schema->outputs.push_back(eport('o', r, c, par));
                        }
                const bool diag = i == j;
                if (!diag) {
                    for (auto name : {"row_c_in", "row_s_in", "col_c_in", "col_s_in"}) schema->inputs.push_back(name);
                }
                // forward neighbours away from the diagonal
                std::vector<CellId> row_fwd, col_fwd;
                if (diag) {
                    for (int d : {-1, 1}) {
                        if (j + d >= 0 && j + d < h) row_fwd.push_back({i, j + d});
                        if (i + d >= 0 && i + d < h) col_fwd.push_back({i + d, j});
                    }
                } else {
                    int rj = j > i ? j + 1 : j - 1;
                    if (rj >= 0 && rj < h) row_fwd.push_back({i, rj});
                    int ci = i < j ? i - 1 : i + 1;
                    if (ci >= 0 && ci < h) col_fwd.push_back({ci, j});
                }
                if (!row_fwd.empty()) { schema->outputs.push_back("row_c"); schema->outputs.push_back("row_s"); }
                if (!col_fwd.empty()) { schema->outputs.push_back("col_c"); schema->outputs.push_back("col_s"); }
                schema->state = {"alpha", "beta", "gamma", "delta", "rc", "rs", "cc", "cs", "step", "rotated"};
                for (const auto& dst : row_fwd) {
                    spec.wiring.push_back({PortRef{{i, j}, "row_c"}, PortRef{dst, "row_c_in"}});
                    spec.wiring.push_back({PortRef{{i, j}, "row_s"}, PortRef{dst, "row_s_in"}});
                }
                for (const auto& dst : col_fwd) {
                    spec.wiring.push_back({PortRef{{i, j}, "col_c"}, PortRef{dst, "col_c_in"}});
                    spec.wiring.push_back({PortRef{{i, j}, "col_s"}, PortRef{dst, "col_s_in"}});
                }
                // element exchange: local (r,c) of this cell receives the element
                // whose position maps onto it
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) {
                        const int sp = from[static_cast<std::size_t>(2 * i + r)];
                        const int sq = from[static_cast<std::size_t>(2 * j + c)];
                        for (int par = 0; par < 2; ++par)
                            spec.wiring.push_back({PortRef{{sp / 2, sq / 2}, eport('o', sp % 2, sq % 2, par)},
                                                   PortRef{{i, j}, eport('e', r, c, par)}});
                    }

                const auto& b0 = g0.at(i, j);
                std::vector<PortValue> init{b0.alpha, b0.beta, b0.gamma, b0.delta, 1.0, 0.0, 1.0, 0.0,
                                            std::int64_t{-1}, Bit{}};
                const bool has_row = !row_fwd.empty(), has_col = !col_fwd.empty();
                auto step = [diag, has_row, has_col, threshold](const engine::CellContext& ctx, std::span<PortValue> st,
                                                                std::span<const PortValue> in,
                                                                std::span<PortValue> out) {
                    using engine::as_real;
                    const int d = std::abs(ctx.cell.row - ctx.cell.col);
                    const auto s = (ctx.tick - d) / 3;
                    Block b;
                    if (s == 0) {
                        b = {as_real(st[0]), as_real(st[1]), as_real(st[2]), as_real(st[3])};
                    } else {
                        const std::size_t base = static_cast<std::size_t>(((s - 1) % 2) * 4);
                        b = {as_real(in[base]), as_real(in[base + 1]), as_real(in[base + 2]), as_real(in[base + 3])};
                    }
                    RotationPair ri, rj;
                    bool done = false;
                    Block nb;
                    if (diag) {
                        auto [r, perf] = diagonal_rotation(b, threshold(static_cast<int>(s)));
                        ri = rj = r;
                        done = perf;
                        nb = rotate_diagonal(b, r, perf);
                    } else {
                        ri = {as_real(in[8]), as_real(in[9])};
                        rj = {as_real(in[10]), as_real(in[11])};
                        nb = rotate_block(b, ri, rj);
                    }
                    st[0] = nb.alpha; st[1] = nb.beta; st[2] = nb.gamma; st[3] = nb.delta;
                    st[4] = ri.c; st[5] = ri.s; st[6] = rj.c; st[7] = rj.s;
                    st[8] = static_cast<std::int64_t>(s);
                    st[9] = Bit{done};
                    const std::size_t ob = static_cast<std::size_t>((s % 2) * 4);
                    out[ob] = nb.alpha; out[ob + 1] = nb.beta; out[ob + 2] = nb.gamma; out[ob + 3] = nb.delta;
                    std::size_t k = 8;
                    if (has_row) { out[k++] = ri.c; out[k++] = ri.s; }
                    if (has_col) { out[k++] = rj.c; out[k++] = rj.s; }
                };
                programs[CellId{i, j}] = engine::CellProgram{schema, init, step};
            }
        }
        array_ = std::make_unique<engine::Array>(std::move(spec), std::move(programs), trace);
    }

    engine::Array& array() { return *array_; }

    /// Rotated (pre-permutation) blocks and diagonal rotations of one step.
    struct StepData {
        std::vector<Block> blocks;
        std::vector<RotationPair> rotations;
        std::vector<bool> performed;
        int filled = 0;
    };

    /// Advances one tick; returns steps that became complete on this tick.
    std::vector<std::pair<int, StepData>> advance() {
        const auto t = array_->current_tick();
        array_->tick({});
        std::vector<std::pair<int, StepData>> done;
        for (int i = 0; i < h_; ++i) {
            for (int j = 0; j < h_; ++j) {
                const int d = std::abs(i - j);
                if (t < d || (t - d) % 3 != 0 || (t - d) / 3 >= total_) continue;
                const int s = static_cast<int>((t - d) / 3);
                auto& sd = pending_[s];
                if (sd.blocks.empty()) {
                    sd.blocks.assign(static_cast<std::size_t>(h_ * h_), Block{});
                    sd.rotations.assign(static_cast<std::size_t>(h_), RotationPair{});
                    sd.performed.assign(static_cast<std::size_t>(h_), false);
                }
                auto st = array_->state(CellId{i, j});
                using engine::as_real;
                sd.blocks[static_cast<std::size_t>(i * h_ + j)] = {as_real(st[0]), as_real(st[1]), as_real(st[2]),
                                                                   as_real(st[3])};
                if (i == j) {
                    sd.rotations[static_cast<std::size_t>(i)] = {as_real(st[4]), as_real(st[5])};
                    sd.performed[static_cast<std::size_t>(i)] = engine::as_bit(st[9]);
                }
                if (++sd.filled == h_ * h_) {
                    done.emplace_back(s, std::move(sd));
                    pending_.erase(s);
                }
            }
        }
        return done;
    }

private:
    int h_;
    int total_;
    std::unique_ptr<engine::Array> array_;
    std::map<int, StepData> pending_;
};

void accumulate_vectors(Eigen::MatrixXd& V, const std::vector<RotationPair>& rots) {
    const int N = static_cast<int>(V.cols());
    for (std::size_t i = 0; i < rots.size(); ++i) {
        const auto& r = rots[i];
        const int p = static_cast<int>(2 * i), q = p + 1;
        Eigen::VectorXd vp = V.col(p), vq = V.col(q);
        V.col(p) = r.c * vp - r.s * vq;
        V.col(q) = r.s * vp + r.c * vq;
    }
    Eigen::MatrixXd W(V.rows(), N);
    for (int p = 0; p < N; ++p) W.col(permutation_target(p + 1, N) - 1) = V.col(p);
    V = std::move(W);
}

}  // namespace

EigenResult run_sweeps(const Eigen::MatrixXd& A, const RunOptions& opts) {
    if (A.rows() != A.cols() || A.rows() == 0) throw InputError("matrix must be square and nonempty");
    if (opts.max_sweeps < 1) throw InputError("max_sweeps must be at least 1");
    if (!A.allFinite()) throw InputError("matrix has non-finite entries");
    const double normA = A.norm();
    if ((A - A.transpose()).norm() > 1e-12 * normA) throw InputError("matrix is not symmetric");

    EigenResult res;
    BlockGrid grid = BlockGrid::pack(A);
    const int N = grid.positions();
    const int steps_per_sweep = std::max(N - 1, 1);
    const double off0 = grid.off_norm();
    const double tol = 1e-10 * normA;
    const int n = grid.n;
    auto threshold_at = [&opts, off0, n, steps_per_sweep](int s) {
        return opts.threshold(s / steps_per_sweep, off0, n);
    };

    Eigen::MatrixXd V;
    if (opts.vectors) V = Eigen::MatrixXd::Identity(N, N);
    auto& rep = res.report;
    rep.off_norms.push_back(off0);
    rep.converged = off0 < tol;

    // Applies one completed step; returns true when iteration should stop.
    auto consume = [&](int s, GridStep&& st) {
        grid = st.grid;
        rep.steps = s + 1;
        rep.off_norms.push_back(grid.off_norm());
        const int sweep = s / steps_per_sweep;
        for (std::size_t i = 0; i < st.rotations.size(); ++i) {
            if (st.performed[i]) ++rep.rotations_performed;
        }
        if (opts.vectors) accumulate_vectors(V, st.rotations);
        if (opts.keep_steps) {
            res.step_grids.push_back(grid);
            res.steps.push_back(std::move(st));
        }
        if ((s + 1) % steps_per_sweep == 0) {
            rep.sweeps_used = sweep + 1;
            if (grid.off_norm() < tol) {
                rep.converged = true;
                return true;
            }
        }
        return false;
    };
    // Rotations skipped by threshold: nonzero target below the bound.
    auto count_skips = [&](int s, const BlockGrid& before, const std::vector<bool>& performed) {
        const int sweep = s / steps_per_sweep;
        if (static_cast<int>(rep.skipped_per_sweep.size()) <= sweep) rep.skipped_per_sweep.resize(sweep + 1, 0);
        for (int i = 0; i < before.h; ++i)
            if (!performed[static_cast<std::size_t>(i)] && before.at(i, i).beta != 0.0)
                ++rep.skipped_per_sweep[static_cast<std::size_t>(sweep)];
    };

    const int total = opts.max_sweeps * steps_per_sweep;
    if (!rep.converged) {
        if (opts.mode == Mode::broadcast) {
            for (int s = 0; s < total; ++s) {
                auto st = grid_step(grid, threshold_at(s));
                count_skips(s, grid, st.performed);
                if (consume(s, std::move(st))) break;
            }
        } else {
            DelayedArray arr(grid, total, threshold_at, {opts.trace, opts.trace_stride});
            bool stop = false;
            while (!stop) {
                for (auto& [s, sd] : arr.advance()) {
                    BlockGrid rotated = grid;
                    rotated.blocks = sd.blocks;
                    GridStep st;
                    st.grid = permute(rotated);
                    st.rotations = sd.rotations;
                    st.performed = sd.performed;
                    for (int i = 0; i < grid.h; ++i)
                        if (sd.performed[static_cast<std::size_t>(i)])
                            st.annihilated += grid.at(i, i).beta * grid.at(i, i).beta;
                    count_skips(s, grid, st.performed);
                    if (consume(s, std::move(st)) || s + 1 == total) stop = true;
                    if (stop) break;
                }
            }
            res.ticks = arr.array().current_tick();
            res.trace = arr.array().take_trace();
        }
    }

    res.eigenvalues.resize(n);
    if (opts.vectors) res.eigenvectors = Eigen::MatrixXd(n, n);
    for (int p = 0; p < N; ++p) {
        const int idx = grid.tracker[static_cast<std::size_t>(p)];
        if (idx >= n) continue;
        res.eigenvalues(idx) = grid.element(p, p);
        if (opts.vectors) res.eigenvectors->col(idx) = V.col(p).head(n);
    }
    return res;
}

}  // namespace systolic::eig
