#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "systolic/engine.hpp"

using namespace systolic::engine;

namespace {

auto pass_schema() {
    return std::make_shared<const PortSchema>(PortSchema{{"in"}, {"out"}, {"last"}});
}

CellProgram pass_through() {
    return {pass_schema(), {std::int64_t{0}}, [](const CellContext&, std::span<PortValue> s,
                                                 std::span<const PortValue> in, std::span<PortValue> out) {
                s[0] = in[0];
                out[0] = in[0];
            }};
}

Array chain(int k, TraceOptions trace = {}, Activation act = {}) {
    ArraySpec spec{Topology::linear(k), {}, std::move(act)};
    std::map<CellId, CellProgram> programs;
    for (int c = 0; c < k; ++c) {
        programs[{0, c}] = pass_through();
        if (c > 0) spec.wiring.push_back({{{0, c - 1}, "out"}, {{0, c}, "in"}});
    }
    return Array(spec, programs, trace);
}

InputSchedule impulse(CellId at, std::int64_t value, std::int64_t ticks) {
    InputSchedule s;
    for (std::int64_t t = 0; t < ticks; ++t) s[t][{at, "in"}] = t == 0 ? value : std::int64_t{0};
    return s;
}

// Grid of accumulators: each cell adds its west and north inputs into its
// state and emits the sum east and south.
Array accumulate_grid(int r, int c, std::uint64_t seed, TraceOptions trace = {}) {
    auto schema = std::make_shared<const PortSchema>(PortSchema{{"w", "n"}, {"e", "s"}, {"acc"}});
    ArraySpec spec{Topology::grid(r, c), {}, {}};
    std::map<CellId, CellProgram> programs;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) {
            const std::int64_t mul = static_cast<std::int64_t>(rng() % 5) + 1;
            programs[{i, j}] = {schema, {std::int64_t{0}},
                                [mul](const CellContext& ctx, std::span<PortValue> s, std::span<const PortValue> in,
                                      std::span<PortValue> out) {
                                    const auto v = as_int(in[0]) + mul * as_int(in[1]) + ctx.tick;
                                    s[0] = as_int(s[0]) + v;
                                    out[0] = v % 1000;
                                    out[1] = (v * 3) % 1000;
                                }};
            if (j > 0) spec.wiring.push_back({{{i, j - 1}, "e"}, {{i, j}, "w"}});
            if (i > 0) spec.wiring.push_back({{{i - 1, j}, "s"}, {{i, j}, "n"}});
        }
    return Array(spec, programs, trace);
}

InputSchedule grid_inputs(int r, int c, std::int64_t ticks, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    InputSchedule s;
    for (std::int64_t t = 0; t < ticks; ++t) {
        for (int i = 0; i < r; ++i) s[t][{{i, 0}, "w"}] = static_cast<std::int64_t>(rng() % 100);
        for (int j = 0; j < c; ++j) s[t][{{0, j}, "n"}] = static_cast<std::int64_t>(rng() % 100);
    }
    return s;
}

}  // namespace

TEST_CASE("construction") {
    CHECK(chain(3).cell_count() == 3);
    CHECK(chain(3).current_tick() == 0);
    CHECK(accumulate_grid(2, 2, 1).cell_count() == 4);

    ArraySpec bad{Topology::grid(2, 2), {{{{0, 0}, "e"}, {{5, 5}, "w"}}}, {}};
    auto schema = std::make_shared<const PortSchema>(PortSchema{{"w"}, {"e"}, {}});
    std::map<CellId, CellProgram> programs;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) programs[{i, j}] = {schema, {}, [](auto&&...) {}};
    CHECK_THROWS_AS(Array(bad, programs), ConstructionError);

    SUBCASE("non-neighbour wire") {
        ArraySpec far{Topology::linear(3), {{{{0, 0}, "out"}, {{0, 2}, "in"}}}, {}};
        std::map<CellId, CellProgram> p;
        for (int c = 0; c < 3; ++c) p[{0, c}] = pass_through();
        CHECK_THROWS_AS(Array(far, p), ConstructionError);
    }
    SUBCASE("duplicate destination") {
        ArraySpec dup{Topology::linear(2), {{{{0, 0}, "out"}, {{0, 1}, "in"}}, {{{0, 0}, "out"}, {{0, 1}, "in"}}}, {}};
        std::map<CellId, CellProgram> p{{{0, 0}, pass_through()}, {{0, 1}, pass_through()}};
        CHECK_THROWS_AS(Array(dup, p), ConstructionError);
    }
    SUBCASE("unknown port") {
        ArraySpec bogus{Topology::linear(2), {{{{0, 0}, "nope"}, {{0, 1}, "in"}}}, {}};
        std::map<CellId, CellProgram> p{{{0, 0}, pass_through()}, {{0, 1}, pass_through()}};
        CHECK_THROWS_AS(Array(bogus, p), ConstructionError);
    }
    SUBCASE("missing program") {
        ArraySpec spec{Topology::linear(2), {}, {}};
        std::map<CellId, CellProgram> p{{{0, 0}, pass_through()}};
        CHECK_THROWS_AS(Array(spec, p), ConstructionError);
    }
}

TEST_CASE("unit delay") {
    auto one = chain(1);
    auto out = one.tick({{{{0, 0}, "in"}, std::int64_t{7}}});
    CHECK(as_int(out.at({{0, 0}, "out"})) == 7);

    auto a = chain(1);
    auto r1 = run(a, impulse({0, 0}, 7, 2), 2);
    CHECK(as_int(r1.outputs.at(1).at({{0, 0}, "out"})) == 7);

    for (int k : {3, 5}) {
        auto arr = chain(k);
        auto r = run(arr, impulse({0, 0}, 7, k + 2), k + 2);
        for (const auto& [t, ports] : r.outputs) {
            const auto v = as_int(ports.at({{0, k - 1}, "out"}));
            CHECK(v == (t == k ? 7 : 0));
        }
    }
}

TEST_CASE("unit-delay law on every wire") {
    auto arr = accumulate_grid(3, 4, 9);
    auto r = run(arr, grid_inputs(3, 4, 12, 5), 12);
    std::map<std::pair<std::int64_t, CellId>, const TraceRecord*> at;
    for (const auto& rec : r.trace.records) at[{rec.tick, rec.cell}] = &rec;
    int checked = 0;
    for (const auto& rec : r.trace.records) {
        if (rec.tick == 0) continue;
        if (rec.cell.col > 0) {
            const auto* src = at.at({rec.tick - 1, {rec.cell.row, rec.cell.col - 1}});
            CHECK(rec.in[0] == src->out[0]);
            ++checked;
        }
        if (rec.cell.row > 0) {
            const auto* src = at.at({rec.tick - 1, {rec.cell.row - 1, rec.cell.col}});
            CHECK(rec.in[1] == src->out[1]);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("missing boundary input") {
    auto arr = chain(2);
    CHECK_THROWS_AS(arr.tick({}), SimulationError);
}

TEST_CASE("payload kind is fixed") {
    auto schema = std::make_shared<const PortSchema>(PortSchema{{}, {"out"}, {}});
    ArraySpec spec{Topology::linear(1), {}, {}};
    std::map<CellId, CellProgram> p{{{0, 0},
                                     {schema, {}, [](const CellContext& ctx, auto, auto, std::span<PortValue> out) {
                                          if (ctx.tick == 0) out[0] = std::int64_t{1};
                                          else out[0] = 1.5;
                                      }}}};
    Array arr(spec, p);
    arr.tick({});
    CHECK_THROWS_AS(arr.tick({}), SimulationError);
}

TEST_CASE("activation gating") {
    auto arr = chain(2, {}, [](CellId id, std::int64_t t) { return !(id.col == 1 && t == 1); });
    PortMap in{{{{0, 0}, "in"}, std::int64_t{4}}};
    arr.tick(in);
    arr.tick(in);
    CHECK(as_int(arr.state({0, 1})[0]) == 0);  // skipped on tick 1
    arr.tick(in);
    CHECK(as_int(arr.state({0, 1})[0]) == 4);
    const auto& recs = arr.trace().records;
    CHECK(std::count_if(recs.begin(), recs.end(), [](const auto& r) { return r.cell.col == 1; }) == 2);
    CHECK(std::none_of(recs.begin(), recs.end(), [](const auto& r) { return r.cell.col == 1 && r.tick == 1; }));
}

TEST_CASE("zero ticks") {
    auto arr = chain(3);
    auto r = run(arr, {}, 0);
    CHECK(r.outputs.empty());
    CHECK(r.trace.records.empty());
    CHECK_THROWS_AS(run(arr, {}, -1), SimulationError);
}

TEST_CASE("determinism and evaluation-order independence") {
    const auto inputs = grid_inputs(4, 4, 20, 3);
    auto a = accumulate_grid(4, 4, 11);
    const auto ref = to_ndjson(run(a, inputs, 20).trace);
    auto b = accumulate_grid(4, 4, 11);
    CHECK(to_ndjson(run(b, inputs, 20).trace) == ref);

    std::vector<std::size_t> order(16);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937 rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(order.begin(), order.end(), rng);
        auto c = accumulate_grid(4, 4, 11);
        c.set_evaluation_order(order);
        CHECK(to_ndjson(run(c, inputs, 20).trace) == ref);
    }
}

TEST_CASE("trace format and stride") {
    auto arr = chain(1);
    auto r = run(arr, impulse({0, 0}, 7, 2), 2);
    CHECK(to_ndjson(r.trace) ==
          "{\"tick\":0,\"row\":0,\"col\":0,\"state\":{\"last\":7},\"in\":{\"in\":7},\"out\":{\"out\":7}}\n"
          "{\"tick\":1,\"row\":0,\"col\":0,\"state\":{\"last\":0},\"in\":{\"in\":0},\"out\":{\"out\":0}}\n");

    auto strided = chain(2, {true, 3});
    auto rs = run(strided, impulse({0, 0}, 1, 7), 7);
    for (const auto& rec : rs.trace.records) CHECK(rec.tick % 3 == 0);
    CHECK(rs.trace.records.size() == 6);

    auto off = chain(2, {false, 1});
    CHECK(run(off, impulse({0, 0}, 1, 3), 3).trace.records.empty());
}

TEST_CASE("payload rendering") {
    auto schema = std::make_shared<const PortSchema>(PortSchema{{}, {"b", "f", "r"}, {}});
    ArraySpec spec{Topology::linear(1), {}, {}};
    std::map<CellId, CellProgram> p{{{0, 0},
                                     {schema, {}, [](auto&&, auto, auto, std::span<PortValue> out) {
                                          out[0] = Bit{true};
                                          out[1] = systolic::gf::FieldElement(5, 7);
                                          out[2] = 0.1;
                                      }}}};
    Array arr(spec, p);
    arr.tick({});
    CHECK(to_ndjson(arr.trace()) ==
          "{\"tick\":0,\"row\":0,\"col\":0,\"state\":{},\"in\":{},\"out\":{\"b\":1,\"f\":5,\"r\":0.1}}\n");
}
