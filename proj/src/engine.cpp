#include "systolic/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace systolic::engine {

namespace {

std::string describe(const PortRef& r) {
    return "(" + std::to_string(r.cell.row) + "," + std::to_string(r.cell.col) + ")." + r.port;
}

int find_port(const std::vector<std::string>& names, const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

nlohmann::ordered_json to_json(const PortValue& v) {
    return std::visit(
        [](const auto& x) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
            else if constexpr (std::is_same_v<T, Bit>) return x.v ? 1 : 0;
            else if constexpr (std::is_same_v<T, gf::FieldElement>) return x.value();
            else return x;
        },
        v);
}

nlohmann::ordered_json to_object(const std::vector<std::string>& names, const std::vector<PortValue>& values) {
    auto obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) obj[names[i]] = to_json(values[i]);
    return obj;
}

}  // namespace

bool as_bit(const PortValue& v) {
    if (auto b = std::get_if<Bit>(&v)) return b->v;
    if (std::holds_alternative<std::monostate>(v)) return false;
    throw SimulationError("port does not carry a bit");
}

double as_real(const PortValue& v) {
    if (auto d = std::get_if<double>(&v)) return *d;
    if (std::holds_alternative<std::monostate>(v)) return 0.0;
    throw SimulationError("port does not carry a real");
}

std::int64_t as_int(const PortValue& v) {
    if (auto d = std::get_if<std::int64_t>(&v)) return *d;
    if (std::holds_alternative<std::monostate>(v)) return 0;
    throw SimulationError("port does not carry an integer word");
}

gf::FieldElement as_field(const PortValue& v, std::uint32_t p) {
    if (auto f = std::get_if<gf::FieldElement>(&v)) return *f;
    if (std::holds_alternative<std::monostate>(v)) return gf::FieldElement(0, p);
    throw SimulationError("port does not carry a field element");
}

Array::Array(ArraySpec spec, std::map<CellId, CellProgram> programs, TraceOptions trace)
    : spec_(std::move(spec)), trace_options_(trace) {
    const auto& topo = spec_.topology;
    if (topo.rows < 0 || topo.cols < 0) throw ConstructionError("negative array size");
    if (topo.kind == Topology::Kind::linear && topo.rows != 1)
        throw ConstructionError("linear arrays have a single row");
    if (trace_options_.stride < 1) throw ConstructionError("trace stride must be positive");

    for (const auto& [id, prog] : programs) {
        if (!topo.contains(id))
            throw ConstructionError("program for out-of-bounds cell (" + std::to_string(id.row) + "," +
                                    std::to_string(id.col) + ")");
    }
    for (int r = 0; r < topo.rows; ++r) {
        for (int c = 0; c < topo.cols; ++c) {
            CellId id{r, c};
            auto it = programs.find(id);
            if (it == programs.end())
                throw ConstructionError("no program for cell (" + std::to_string(r) + "," + std::to_string(c) + ")");
            const auto& prog = it->second;
            if (!prog.schema || !prog.step) throw ConstructionError("incomplete cell program");
            if (prog.initial_state.size() != prog.schema->state.size())
                throw ConstructionError("initial state does not match state schema");
            Cell cell;
            cell.id = id;
            cell.program = prog;
            cell.state = prog.initial_state;
            cell.out.assign(prog.schema->outputs.size(), PortValue{});
            cell.pending = cell.out;
            cell.in.assign(prog.schema->inputs.size(), PortValue{});
            cell.sources.assign(prog.schema->inputs.size(), Source{});
            cell.kinds.assign(prog.schema->outputs.size(), 0);
            cells_.push_back(std::move(cell));
        }
    }

    std::vector<std::vector<bool>> wired_in(cells_.size()), wired_out(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        wired_in[i].assign(cells_[i].sources.size(), false);
        wired_out[i].assign(cells_[i].out.size(), false);
    }
    for (const auto& w : spec_.wiring) {
        if (!topo.contains(w.from.cell) || !topo.contains(w.to.cell))
            throw ConstructionError("dangling wire " + describe(w.from) + " -> " + describe(w.to));
        int dr = std::abs(w.from.cell.row - w.to.cell.row);
        int dc = std::abs(w.from.cell.col - w.to.cell.col);
        bool near = topo.kind == Topology::Kind::linear ? dr + dc <= 1 : (dr <= 1 && dc <= 1);
        if (!near) throw ConstructionError("wire is not nearest-neighbour: " + describe(w.from) + " -> " + describe(w.to));
        auto si = index_of(w.from.cell), di = index_of(w.to.cell);
        int sp = find_port(cells_[si].program.schema->outputs, w.from.port);
        int dp = find_port(cells_[di].program.schema->inputs, w.to.port);
        if (sp < 0) throw ConstructionError("dangling wire: no output port " + describe(w.from));
        if (dp < 0) throw ConstructionError("dangling wire: no input port " + describe(w.to));
        if (wired_in[di][static_cast<std::size_t>(dp)])
            throw ConstructionError("duplicate destination port " + describe(w.to));
        wired_in[di][static_cast<std::size_t>(dp)] = true;
        wired_out[si][static_cast<std::size_t>(sp)] = true;
        cells_[di].sources[static_cast<std::size_t>(dp)] = Source{static_cast<int>(si), sp, 0};
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        auto& cell = cells_[i];
        for (std::size_t p = 0; p < cell.sources.size(); ++p) {
            if (!wired_in[i][p]) {
                cell.sources[p].boundary = boundary_ports_.size();
                boundary_ports_.push_back(PortRef{cell.id, cell.program.schema->inputs[p]});
            }
        }
        for (std::size_t p = 0; p < cell.out.size(); ++p)
            if (!wired_out[i][p]) cell.boundary_outputs.push_back(static_cast<int>(p));
    }
    order_.resize(cells_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
}

std::size_t Array::index_of(CellId id) const {
    return static_cast<std::size_t>(id.row) * static_cast<std::size_t>(spec_.topology.cols) +
           static_cast<std::size_t>(id.col);
}

std::span<const PortValue> Array::state(CellId id) const {
    if (!spec_.topology.contains(id)) throw SimulationError("state of out-of-bounds cell");
    return cells_[index_of(id)].state;
}

const PortSchema& Array::schema(CellId id) const {
    if (!spec_.topology.contains(id)) throw SimulationError("schema of out-of-bounds cell");
    return *cells_[index_of(id)].program.schema;
}

void Array::set_evaluation_order(std::vector<std::size_t> order) {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != i) throw SimulationError("evaluation order is not a permutation");
    if (sorted.size() != cells_.size()) throw SimulationError("evaluation order is not a permutation");
    order_ = std::move(order);
}

Trace Array::take_trace() {
    Trace t = std::move(trace_);
    trace_ = Trace{};
    return t;
}

PortMap Array::tick(const PortMap& boundary_inputs) {
    const bool record = trace_options_.enabled && tick_ % trace_options_.stride == 0;

    // Phase 1: every active cell reads committed values and computes.
    for (auto i : order_) {
        auto& cell = cells_[i];
        cell.active = !spec_.activation || spec_.activation(cell.id, tick_);
        if (!cell.active) continue;
        for (std::size_t p = 0; p < cell.sources.size(); ++p) {
            const auto& src = cell.sources[p];
            if (src.cell >= 0) {
                cell.in[p] = cells_[static_cast<std::size_t>(src.cell)].out[static_cast<std::size_t>(src.port)];
            } else {
                auto it = boundary_inputs.find(boundary_ports_[src.boundary]);
                if (it == boundary_inputs.end())
                    throw SimulationError("missing boundary input " + describe(boundary_ports_[src.boundary]) +
                                          " at tick " + std::to_string(tick_));
                cell.in[p] = it->second;
            }
        }
        std::copy(cell.out.begin(), cell.out.end(), cell.pending.begin());
        cell.program.step(CellContext{cell.id, tick_}, cell.state, cell.in, cell.pending);
    }

    // Phase 2: commit in row-major order so traces are order independent.
    PortMap outputs;
    for (auto& cell : cells_) {
        if (!cell.active) continue;
        for (std::size_t p = 0; p < cell.pending.size(); ++p) {
            const auto& v = cell.pending[p];
            if (v.index() == 0) continue;
            if (cell.kinds[p] == 0) cell.kinds[p] = v.index();
            else if (cell.kinds[p] != v.index())
                throw SimulationError("port " + describe(PortRef{cell.id, cell.program.schema->outputs[p]}) +
                                      " changed payload kind");
        }
        std::swap(cell.out, cell.pending);
        for (int p : cell.boundary_outputs)
            outputs[PortRef{cell.id, cell.program.schema->outputs[static_cast<std::size_t>(p)]}] =
                cell.out[static_cast<std::size_t>(p)];
        if (record) trace_.records.push_back(TraceRecord{tick_, cell.id, cell.program.schema, cell.state, cell.in, cell.out});
    }
    ++tick_;
    return outputs;
}

RunResult run(Array& array, const InputSchedule& inputs, std::int64_t n_ticks) {
    if (n_ticks < 0) throw SimulationError("negative tick count");
    RunResult result;
    const PortMap none;
    for (std::int64_t k = 0; k < n_ticks; ++k) {
        auto t = array.current_tick();
        auto it = inputs.find(t);
        auto out = array.tick(it == inputs.end() ? none : it->second);
        if (!out.empty()) result.outputs[t + 1] = std::move(out);
    }
    result.trace = array.take_trace();
    return result;
}

void write_ndjson(std::ostream& os, const Trace& trace) {
    for (const auto& r : trace.records) {
        nlohmann::ordered_json j;
        j["tick"] = r.tick;
        j["row"] = r.cell.row;
        j["col"] = r.cell.col;
        j["state"] = to_object(r.schema->state, r.state);
        j["in"] = to_object(r.schema->inputs, r.in);
        j["out"] = to_object(r.schema->outputs, r.out);
        os << j.dump() << '\n';
    }
}

std::string to_ndjson(const Trace& trace) {
    std::ostringstream os;
    write_ndjson(os, trace);
    return os.str();
}

}  // namespace systolic::engine
