#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "systolic/engine.hpp"
#include "systolic/gfield.hpp"

namespace systolic::polygcd {

using gf::FieldElement;
using gf::FieldPoly;

enum class Variant { fig4, appA };

struct EncodeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// One pair laid out as input slots, highest degree first, leading terms in
/// slot 0. fig4 frames carry `d`; appA frames carry stop and sig.
struct PolyStreamFrame {
    Variant variant = Variant::fig4;
    std::uint32_t modulus = 2;
    std::vector<FieldElement> a, b;
    std::vector<bool> start, stop, sig;
    std::vector<std::int64_t> d;
    bool swapped = false;  ///< appA: A and B exchanged so deg B <= deg A

    std::size_t length() const { return a.size(); }
};

PolyStreamFrame encode_frame(const FieldPoly& A, const FieldPoly& B, Variant variant);

enum class Fig4Mode : std::int64_t { initial = 0, reduceA = 1, reduceB = 2 };

struct PolyCellStateFig4 {
    FieldElement a, b, q;
    std::int64_t d = 0;
    bool start = false;
    Fig4Mode state = Fig4Mode::initial;
};

struct Fig4Ports {
    FieldElement a, b;
    bool start = false;
    std::int64_t d = 0;
};

PolyCellStateFig4 fig4_reset(std::uint32_t p);
std::pair<PolyCellStateFig4, Fig4Ports> fig4_cell_step(PolyCellStateFig4 s, const Fig4Ports& in);

enum class AppAMode : std::int64_t { initial = 0, shift = 1, swap = 2, trans = 3 };

struct PolyCellStateAppA {
    FieldElement a, b, q;
    bool start = false, stop = false, sig = false;
    AppAMode state = AppAMode::initial;
};

struct AppAPorts {
    FieldElement a, b;
    bool start = false, stop = false, sig = false;
};

PolyCellStateAppA appA_reset(std::uint32_t p);
std::pair<PolyCellStateAppA, AppAPorts> appA_cell_step(PolyCellStateAppA s, const AppAPorts& in);

/// Linear array of `cells` cells of the given variant.
engine::Array build_poly_array(Variant variant, std::uint32_t p, int cells, engine::TraceOptions trace = {false, 1});

/// Cells needed for a pair: deg A + deg B + 1, counting a zero polynomial as degree 0.
int cells_for(const FieldPoly& A, const FieldPoly& B);

struct RunOptions {
    bool trace = false;
    int trace_stride = 1;
};

struct PolyGcdResult {
    FieldPoly g;
    std::int64_t latency = 0;  ///< ticks from leading-term entry to first GCD coefficient
    int cells = 0;
    std::int64_t ticks = 0;
    engine::Trace trace;
};

PolyGcdResult systolic_poly_gcd(const FieldPoly& A, const FieldPoly& B, Variant variant, const RunOptions& opts = {});

struct BatchResult {
    std::vector<PolyGcdResult> results;
    int cells = 0;
    std::int64_t ticks = 0;
    engine::Trace trace;
};

/// Runs all pairs through one array with frames injected back to back.
BatchResult pipeline_batch(const std::vector<std::pair<FieldPoly, FieldPoly>>& pairs, Variant variant,
                           const RunOptions& opts = {});

/// Serial sequence of R_A / R_B transformations of the kind the cells apply,
/// applied until one polynomial vanishes.
struct Transformation {
    bool on_a = true;  ///< R_A (reduces A) or R_B
    FieldElement q;
    int shift = 0;
    int reduction = 0;  ///< drop in deg A + deg B
    FieldPoly A, B;     ///< pair after the transformation
};
std::vector<Transformation> transformation_sequence(const FieldPoly& A, const FieldPoly& B);

/// A single R_A step: A - q x^d B with d = deg A - deg B, q = lead A / lead B.
FieldPoly apply_RA(const FieldPoly& A, const FieldPoly& B);

}  // namespace systolic::polygcd
