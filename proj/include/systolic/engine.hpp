#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "systolic/gfield.hpp"

namespace systolic::engine {

struct ConstructionError : std::logic_error {
    using std::logic_error::logic_error;
};

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CellId {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const CellId&, const CellId&) = default;
};

struct Bit {
    bool v = false;
    friend bool operator==(const Bit&, const Bit&) = default;
};

/// Payload carried by one port or one state register.
using PortValue = std::variant<std::monostate, Bit, gf::FieldElement, double, std::int64_t>;

// Reading helpers; an empty value reads as zero.
bool as_bit(const PortValue& v);
double as_real(const PortValue& v);
std::int64_t as_int(const PortValue& v);
gf::FieldElement as_field(const PortValue& v, std::uint32_t p);

struct PortRef {
    CellId cell;
    std::string port;
    friend auto operator<=>(const PortRef&, const PortRef&) = default;
};

using PortMap = std::map<PortRef, PortValue>;

struct Topology {
    enum class Kind { linear, grid };
    Kind kind = Kind::linear;
    int rows = 1;
    int cols = 0;

    static Topology linear(int length) { return {Kind::linear, 1, length}; }
    static Topology grid(int rows, int cols) { return {Kind::grid, rows, cols}; }
    bool contains(CellId c) const { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; }
    int size() const { return rows * cols; }
};

struct Wire {
    PortRef from;  ///< output port of the source cell
    PortRef to;    ///< input port of the destination cell
};

using Activation = std::function<bool(CellId, std::int64_t tick)>;

struct ArraySpec {
    Topology topology;
    std::vector<Wire> wiring;
    Activation activation;  ///< empty means every cell is active on every tick
};

struct CellContext {
    CellId cell;
    std::int64_t tick;
};

/// One activation of a cell. `in` holds the values committed on the previous
/// tick (or boundary values); `out` arrives pre-filled with the latched
/// outputs so untouched ports keep their value.
using StepFn = std::function<void(const CellContext&, std::span<PortValue> state,
                                  std::span<const PortValue> in, std::span<PortValue> out)>;

struct PortSchema {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<std::string> state;
};

struct CellProgram {
    std::shared_ptr<const PortSchema> schema;
    std::vector<PortValue> initial_state;
    StepFn step;
};

struct TraceRecord {
    std::int64_t tick = 0;
    CellId cell;
    std::shared_ptr<const PortSchema> schema;
    std::vector<PortValue> state;
    std::vector<PortValue> in;
    std::vector<PortValue> out;
};

struct Trace {
    std::vector<TraceRecord> records;
};

/// Newline-delimited JSON, one object per record with fields
/// tick,row,col,state,in,out.
void write_ndjson(std::ostream& os, const Trace& trace);
std::string to_ndjson(const Trace& trace);

struct TraceOptions {
    bool enabled = true;
    int stride = 1;  ///< keep ticks with tick % stride == 0
};

class Array {
public:
    /// Validates the wiring; throws ConstructionError.
    Array(ArraySpec spec, std::map<CellId, CellProgram> programs, TraceOptions trace = {});

    /// Runs one synchronous tick. Returns the values written this tick on
    /// unwired output ports of the cells that were active.
    PortMap tick(const PortMap& boundary_inputs);

    std::int64_t current_tick() const { return tick_; }
    std::size_t cell_count() const { return cells_.size(); }
    const Topology& topology() const { return spec_.topology; }
    std::span<const PortValue> state(CellId id) const;
    const PortSchema& schema(CellId id) const;

    /// Evaluation order of the cells within a tick, as a permutation of
    /// 0..cell_count()-1 in row-major cell order. Has no observable effect.
    void set_evaluation_order(std::vector<std::size_t> order);

    const Trace& trace() const { return trace_; }
    Trace take_trace();

private:
    struct Source {
        int cell = -1;  // -1: boundary
        int port = 0;
        std::size_t boundary = 0;
    };
    struct Cell {
        CellId id;
        CellProgram program;
        std::vector<PortValue> state;
        std::vector<PortValue> out;
        std::vector<PortValue> pending;
        std::vector<PortValue> in;
        std::vector<Source> sources;
        std::vector<int> boundary_outputs;
        std::vector<std::size_t> kinds;  // payload kind per output, 0 = not yet written
        bool active = false;
    };

    std::size_t index_of(CellId id) const;

    ArraySpec spec_;
    std::vector<Cell> cells_;
    std::vector<PortRef> boundary_ports_;
    std::vector<std::size_t> order_;
    std::int64_t tick_ = 0;
    TraceOptions trace_options_;
    Trace trace_;
};

using InputSchedule = std::map<std::int64_t, PortMap>;
using OutputSchedule = std::map<std::int64_t, PortMap>;

struct RunResult {
    /// Keyed by the tick at which the value is observable: a value written
    /// during tick T is reported at T+1.
    OutputSchedule outputs;
    Trace trace;
};

/// Runs n_ticks ticks; ticks missing from the schedule get no boundary input.
RunResult run(Array& array, const InputSchedule& inputs, std::int64_t n_ticks);

}  // namespace systolic::engine
