#include "systolic/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "systolic/eigen.hpp"
#include "systolic/generators.hpp"
#include "systolic/intgcd.hpp"
#include "systolic/oracle.hpp"
#include "systolic/polygcd.hpp"
#include "systolic/toeplitz.hpp"

namespace systolic::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Global {
    std::uint64_t seed = 1;
    std::string format = "human";
    std::string trace_path;
    int trace_stride = 1;
    bool json() const { return format == "json"; }
    bool tracing() const { return !trace_path.empty(); }
};

std::string num(double v, int digits = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

void write_trace(const Global& g, const engine::Trace& trace) {
    if (!g.tracing()) return;
    std::ofstream os(g.trace_path);
    if (!os) throw UsageError("cannot open trace file " + g.trace_path);
    engine::write_ndjson(os, trace);
}

std::vector<double> read_reals(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::vector<double> v;
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("not a real number in " + path + ": " + tok);
        }
    }
    return v;
}

json coeff_array(const gf::FieldPoly& g) {
    json a = json::array();
    for (int i = 0; i <= g.degree(); ++i) a.push_back(g.coeff(i).value());
    return a;
}

json vec_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

// ---------------------------------------------------------------- polygcd

struct PolyArgs {
    std::uint32_t p = 2;
    std::string a, b, variant = "fig4";
};

int cmd_polygcd(const Global& g, const PolyArgs& args, std::ostream& out) {
    gf::FieldPoly A, B;
    try {
        gf::PrimeField field(args.p);
        A = gf::FieldPoly::parse(args.a, field.modulus());
        B = gf::FieldPoly::parse(args.b, field.modulus());
    } catch (const gf::FieldError& e) {
        throw UsageError(e.what());
    }
    if (A.is_zero() && B.is_zero()) throw UsageError("gcd(0, 0) is undefined");
    const auto variant = args.variant == "appA" ? polygcd::Variant::appA : polygcd::Variant::fig4;
    auto r = polygcd::systolic_poly_gcd(A, B, variant, {g.tracing(), g.trace_stride});
    write_trace(g, r.trace);
    if (g.json()) {
        json j;
        j["gcd"] = coeff_array(r.g);
        j["modulus"] = args.p;
        j["latency"] = r.latency;
        j["cells"] = r.cells;
        j["ticks"] = r.ticks;
        out << j.dump() << '\n';
    } else {
        out << "gcd " << r.g.to_string() << '\n'
            << "latency " << r.latency << " ticks\n"
            << "cells " << r.cells << '\n'
            << "ticks " << r.ticks << '\n';
    }
    return ok;
}

// ---------------------------------------------------------------- intgcd

struct IntArgs {
    std::int64_t a = 0, b = 0;
    int bits = 0;
    std::string mode = "systolic";
    bool four_n = false;
};

std::uint64_t magnitude(std::int64_t v) { return v < 0 ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v); }

int cmd_intgcd(const Global& g, const IntArgs& args, std::ostream& out) {
    if (args.a == 0 || args.b == 0) throw UsageError("inputs must be nonzero");
    const int need = std::max(intgcd::bit_length(magnitude(args.a)), intgcd::bit_length(magnitude(args.b)));
    const int n = args.bits > 0 ? args.bits : need;
    if (n < need) throw UsageError("--bits too small for the inputs");
    json j;
    std::ostringstream human;
    if (args.mode == "systolic") {
        if (n > 64) throw UsageError("--bits must be at most 64");
        intgcd::RunOptions opts{g.tracing(), g.trace_stride, args.four_n};
        auto r = intgcd::systolic_int_gcd(magnitude(args.a), magnitude(args.b), n, opts);
        write_trace(g, r.trace);
        j["gcd"] = r.g;
        j["cells"] = r.cells;
        j["ticks"] = r.ticks;
        human << "gcd " << r.g << "\ncells " << r.cells << "\nticks " << r.ticks << '\n';
    } else {
        // host side normalisation: strip the common power of two, make a odd
        std::int64_t a = args.a, b = args.b;
        int e = 0;
        while (a % 2 == 0 && b % 2 == 0) a /= 2, b /= 2, ++e;
        if (a % 2 == 0) std::swap(a, b);
        std::uint64_t gcd = 0;
        if (args.mode == "precursor") {
            auto r = intgcd::pm_precursor(a, b, n);
            gcd = static_cast<std::uint64_t>(r.g) << e;
            j["gcd"] = gcd;
            j["iterations"] = r.iterations;
            human << "gcd " << gcd << "\niterations " << r.iterations << '\n';
        } else {
            std::vector<intgcd::PMStep> steps;
            gcd = static_cast<std::uint64_t>(intgcd::pm_serial(a, b, &steps)) << e;
            j["gcd"] = gcd;
            j["iterations"] = steps.size();
            human << "gcd " << gcd << "\niterations " << steps.size() << '\n';
        }
    }
    out << (g.json() ? j.dump() + "\n" : human.str());
    return ok;
}

// ---------------------------------------------------------------- toeplitz

struct ToeplitzArgs {
    int n = -1;
    std::string bands, rhs, mode = "systolic";
    int random = 0;
};

int cmd_toeplitz(const Global& g, const ToeplitzArgs& args, std::ostream& out, std::ostream& err) {
    toeplitz::ToeplitzBands T;
    if (args.random > 0) {
        gen::Rng rng(g.seed);
        T = gen::random_dominant_toeplitz(rng, args.random);
    } else {
        if (args.bands.empty() || args.rhs.empty()) throw UsageError("--bands and --rhs are required without --random");
        auto diag = read_reals(args.bands);
        auto rhs = read_reals(args.rhs);
        if (args.n >= 0 && (diag.size() != static_cast<std::size_t>(2 * args.n + 1) ||
                            rhs.size() != static_cast<std::size_t>(args.n + 1)))
            throw UsageError("--n " + std::to_string(args.n) + " expects 2n+1 bands and n+1 right-hand sides");
        try {
            T = toeplitz::ToeplitzBands(std::move(diag), std::move(rhs));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    json j;
    std::vector<double> x;
    try {
        if (args.mode == "serial") {
            x = toeplitz::bareiss_solve(T);
        } else {
            auto r = toeplitz::systolic_toeplitz_solve(T, {g.tracing(), g.trace_stride});
            write_trace(g, r.trace);
            x = r.x;
            j["ticks"] = r.ticks;
            j["completion_tick"] = r.completion_tick;
            j["multiplications"] = r.multiplications;
            j["registers_per_cell"] = r.registers_per_cell;
        }
    } catch (const toeplitz::SingularMinorError& e) {
        err << "numerical breakdown: " << e.what() << '\n';
        return numerical_breakdown;
    }
    if (g.json()) {
        json o;
        o["n"] = T.n;
        o["x"] = vec_json(x);
        for (auto& [k, v] : j.items()) o[k] = v;
        out << o.dump() << '\n';
    } else {
        out << "n " << T.n << '\n';
        for (std::size_t i = 0; i < x.size(); ++i) out << "x" << i << ' ' << num(x[i]) << '\n';
        for (auto& [k, v] : j.items()) out << k << ' ' << v.dump() << '\n';
    }
    return ok;
}

// ---------------------------------------------------------------- eigen

struct EigenArgs {
    std::string matrix, mode = "broadcast";
    int random = 0;
    int max_sweeps = 10;
    bool vectors = false;
};

Eigen::MatrixXd read_matrix(const std::string& path) {
    auto v = read_reals(path);
    if (v.empty()) throw UsageError("empty matrix file");
    const double nd = v[0];
    if (nd < 1 || nd != std::floor(nd)) throw UsageError("matrix order must be a positive integer");
    const auto n = static_cast<Eigen::Index>(nd);
    if (v.size() != static_cast<std::size_t>(1 + n * (n + 1) / 2))
        throw UsageError("expected n(n+1)/2 lower-triangle entries");
    Eigen::MatrixXd A(n, n);
    std::size_t k = 1;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c <= i; ++c) A(i, c) = A(c, i) = v[k++];
    return A;
}

int cmd_eigen(const Global& g, const EigenArgs& args, std::ostream& out, std::ostream& err) {
    Eigen::MatrixXd A;
    if (args.random > 0) {
        gen::Rng rng(g.seed);
        A = gen::random_symmetric(rng, args.random);
    } else if (!args.matrix.empty()) {
        A = read_matrix(args.matrix);
    } else {
        throw UsageError("--matrix or --random is required");
    }
    eig::RunOptions opts;
    opts.mode = args.mode == "delayed" ? eig::Mode::delayed : eig::Mode::broadcast;
    opts.max_sweeps = args.max_sweeps;
    opts.vectors = args.vectors;
    opts.trace = g.tracing();
    opts.trace_stride = g.trace_stride;
    auto r = eig::run_sweeps(A, opts);
    write_trace(g, r.trace);
    if (g.json()) {
        json j;
        j["n"] = A.rows();
        j["eigenvalues"] = vec_json(std::vector<double>(r.eigenvalues.begin(), r.eigenvalues.end()));
        j["sweeps"] = r.report.sweeps_used;
        j["steps"] = r.report.steps;
        j["converged"] = r.report.converged;
        j["rotations"] = r.report.rotations_performed;
        if (opts.mode == eig::Mode::delayed) j["ticks"] = r.ticks;
        if (r.eigenvectors) {
            json cols = json::array();
            for (Eigen::Index c = 0; c < r.eigenvectors->cols(); ++c) {
                const Eigen::VectorXd col = r.eigenvectors->col(c);
                cols.push_back(vec_json(std::vector<double>(col.begin(), col.end())));
            }
            j["eigenvectors"] = cols;
        }
        out << j.dump() << '\n';
    } else {
        out << "n " << A.rows() << "\nsweeps " << r.report.sweeps_used << "\nsteps " << r.report.steps
            << "\nconverged " << (r.report.converged ? "yes" : "no") << "\nrotations "
            << r.report.rotations_performed << '\n';
        if (opts.mode == eig::Mode::delayed) out << "ticks " << r.ticks << '\n';
        for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
            out << "lambda" << i << ' ' << num(r.eigenvalues(i));
            if (r.eigenvectors)
                for (Eigen::Index k = 0; k < r.eigenvectors->rows(); ++k) out << ' ' << num((*r.eigenvectors)(k, i));
            out << '\n';
        }
    }
    if (!r.report.converged) {
        err << "not converged within " << args.max_sweeps << " sweeps\n";
        return numerical_breakdown;
    }
    return ok;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::string family;
    int count = 10;
};

struct Tally {
    int total = 0, passed = 0;
    json instances = json::array();
    std::ostringstream human;
};

void record(Tally& t, bool pass, json inst, const std::string& line) {
    ++t.total;
    if (pass) ++t.passed;
    inst["pass"] = pass;
    t.instances.push_back(std::move(inst));
    t.human << line << (pass ? " pass" : " FAIL") << '\n';
}

json verify_polygcd(const Global& g, int count, Tally& t) {
    static constexpr std::uint32_t primes[] = {2, 7, 257};
    gen::Rng rng(g.seed);
    std::int64_t max_latency = 0;
    for (int i = 0; i < count; ++i) {
        const auto p = primes[i % 3];
        auto A = gen::random_poly(rng, p, 16);
        auto B = gen::random_poly(rng, p, 16);
        const auto want = oracle::euclid_poly_gcd(A, B);
        const int m = A.degree(), n = B.degree();
        bool pass = true;
        json inst;
        inst["p"] = p;
        inst["deg_a"] = m;
        inst["deg_b"] = n;
        std::ostringstream line;
        line << "polygcd " << i << " p=" << p << " deg=(" << m << ',' << n << ')';
        for (auto variant : {polygcd::Variant::fig4, polygcd::Variant::appA}) {
            const bool first = i == 0 && variant == polygcd::Variant::fig4;
            auto r = polygcd::systolic_poly_gcd(A, B, variant, {first && g.tracing(), g.trace_stride});
            if (first) write_trace(g, r.trace);
            const bool ok_v = r.g == want && r.latency <= 2 * (m + n + 1) && r.cells == m + n + 1;
            pass = pass && ok_v;
            const char* name = variant == polygcd::Variant::fig4 ? "fig4" : "appA";
            inst[name] = {{"latency", r.latency}, {"cells", r.cells}};
            line << ' ' << name << ":latency=" << r.latency;
            max_latency = std::max(max_latency, r.latency);
        }
        inst["gcd_degree"] = want.degree();
        record(t, pass, std::move(inst), line.str());
    }
    return {{"max_latency", max_latency}};
}

json verify_intgcd(const Global& g, int count, Tally& t) {
    gen::Rng rng(g.seed);
    std::int64_t max_ticks = 0;
    for (int i = 0; i < count; ++i) {
        const int n = static_cast<int>(rng.uniform_int(2, 64));
        auto [a, b] = gen::random_int_pair(rng, n);
        const auto want = oracle::euclid_uint_gcd(a, b);
        auto r = intgcd::systolic_int_gcd(a, b, n, {i == 0 && g.tracing(), g.trace_stride, false});
        if (i == 0) write_trace(g, r.trace);
        max_ticks = std::max(max_ticks, r.ticks);
        json inst{{"n", n}, {"a", a}, {"b", b}, {"gcd", r.g}, {"cells", r.cells}, {"ticks", r.ticks}};
        std::ostringstream line;
        line << "intgcd " << i << " n=" << n << " a=" << a << " b=" << b << " gcd=" << r.g << " cells=" << r.cells;
        record(t, r.g == want, std::move(inst), line.str());
    }
    return {{"max_ticks", max_ticks}};
}

json verify_toeplitz(const Global& g, int count, Tally& t) {
    gen::Rng rng(g.seed);
    double max_err = 0;
    for (int i = 0; i < count; ++i) {
        const int n = static_cast<int>(rng.uniform_int(1, 32));
        auto T = gen::random_dominant_toeplitz(rng, n);
        auto lu = oracle::dense_lu_solve_nopivot(T.dense(), T.rhs_vector());
        auto r = toeplitz::systolic_toeplitz_solve(T, {i == 0 && g.tracing(), g.trace_stride});
        if (i == 0) write_trace(g, r.trace);
        const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.x.data(), n + 1);
        const double e = (x - lu.x).norm() / lu.x.norm();
        max_err = std::max(max_err, e);
        const bool pass = e < 1e-10 && r.completion_tick == 4 * n;
        json inst{{"n", n}, {"error", e}, {"completion_tick", r.completion_tick}, {"multiplications", r.multiplications}};
        std::ostringstream line;
        line << "toeplitz " << i << " n=" << n << " error=" << num(e, 3) << " completion=" << r.completion_tick;
        record(t, pass, std::move(inst), line.str());
    }
    // one seeded instance with a_0 = 0 must be refused
    const int n = static_cast<int>(rng.uniform_int(1, 8));
    auto T = gen::random_dominant_toeplitz(rng, n);
    T.diag[static_cast<std::size_t>(n)] = 0.0;
    bool singular = false;
    try {
        toeplitz::systolic_toeplitz_solve(T);
    } catch (const toeplitz::SingularMinorError&) {
        singular = true;
    }
    json inst{{"n", n}, {"expected_singular", true}, {"singular", singular}};
    record(t, singular, std::move(inst), "toeplitz singular n=" + std::to_string(n) + " a0=0 expected-singular");
    return {{"max_error", max_err}};
}

json verify_eigen(const Global& g, int count, Tally& t) {
    gen::Rng rng(g.seed);
    double max_err = 0;
    int max_sweeps = 0;
    for (int i = 0; i < count; ++i) {
        const int n = static_cast<int>(rng.uniform_int(2, 16));
        auto A = gen::random_symmetric(rng, n);
        eig::RunOptions opts;
        opts.mode = eig::Mode::delayed;
        opts.trace = i == 0 && g.tracing();
        opts.trace_stride = g.trace_stride;
        auto r = eig::run_sweeps(A, opts);
        if (i == 0) write_trace(g, r.trace);
        auto want = oracle::serial_cyclic_jacobi(A).eigenvalues;
        Eigen::VectorXd got = r.eigenvalues;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        const double e = (got - want).cwiseAbs().maxCoeff() / A.norm();
        max_err = std::max(max_err, e);
        max_sweeps = std::max(max_sweeps, r.report.sweeps_used);
        const bool pass = r.report.converged && e < 1e-8 && r.report.sweeps_used <= 10;
        json inst{{"n", n}, {"error", e}, {"sweeps", r.report.sweeps_used}, {"ticks", r.ticks}};
        std::ostringstream line;
        line << "eigen " << i << " n=" << n << " error=" << num(e, 3) << " sweeps=" << r.report.sweeps_used;
        record(t, pass, std::move(inst), line.str());
    }
    return {{"max_error", max_err}, {"max_sweeps", max_sweeps}};
}

int cmd_verify(const Global& g, const VerifyArgs& args, std::ostream& out) {
    if (args.count < 0) throw UsageError("--count must be non-negative");
    Tally t;
    json stats;
    if (args.family == "polygcd") stats = verify_polygcd(g, args.count, t);
    else if (args.family == "intgcd") stats = verify_intgcd(g, args.count, t);
    else if (args.family == "toeplitz") stats = verify_toeplitz(g, args.count, t);
    else if (args.family == "eigen") stats = verify_eigen(g, args.count, t);
    else throw UsageError("unknown family " + args.family);
    if (g.json()) {
        json j{{"family", args.family}, {"seed", g.seed}, {"passed", t.passed}, {"total", t.total}};
        for (auto& [k, v] : stats.items()) j[k] = v;
        j["instances"] = std::move(t.instances);
        out << j.dump() << '\n';
    } else {
        out << t.human.str() << args.family << ' ' << t.passed << '/' << t.total << " pass";
        for (auto& [k, v] : stats.items())
            out << ' ' << k << '=' << (v.is_number_float() ? num(v.get<double>(), 3) : v.dump());
        out << '\n';
    }
    return t.passed == t.total ? ok : verification_failure;
}

// ---------------------------------------------------------------- trace-stats

int cmd_trace_stats(const Global& g, const std::string& path, std::ostream& out) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    UtilisationReport r;
    try {
        r = trace_stats(in);
    } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
    }
    if (g.json()) {
        json cells = json::array();
        for (const auto& [id, f] : r.per_cell) cells.push_back({{"row", id.first}, {"col", id.second}, {"utilisation", f}});
        json j{{"first_tick", r.first_tick}, {"last_tick", r.last_tick}, {"cells", r.cells},
               {"mean", r.mean},          {"diagonal_mean", r.diagonal_mean}, {"per_cell", cells}};
        out << j.dump() << '\n';
    } else {
        out << "ticks " << r.first_tick << ".." << r.last_tick << "\ncells " << r.cells << "\nmean " << num(r.mean, 6)
            << "\ndiagonal " << num(r.diagonal_mean, 6) << '\n';
        for (const auto& [id, f] : r.per_cell) out << "cell " << id.first << ',' << id.second << ' ' << num(f, 6) << '\n';
    }
    return ok;
}

}  // namespace

UtilisationReport trace_stats(std::istream& in) {
    UtilisationReport r;
    std::map<std::pair<int, int>, std::int64_t> active;
    std::string line;
    std::size_t lineno = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::int64_t tick;
        int row, col;
        try {
            auto j = nlohmann::json::parse(line);
            tick = j.at("tick").get<std::int64_t>();
            row = j.at("row").get<int>();
            col = j.at("col").get<int>();
        } catch (const nlohmann::json::exception&) {
            throw std::runtime_error("malformed trace record on line " + std::to_string(lineno));
        }
        if (!any) r.first_tick = r.last_tick = tick;
        r.first_tick = std::min(r.first_tick, tick);
        r.last_tick = std::max(r.last_tick, tick);
        any = true;
        ++active[{row, col}];
    }
    if (!any) return r;
    // the span runs from the first to the last tick on which any cell was active
    const double span = static_cast<double>(r.last_tick - r.first_tick + 1);
    r.cells = active.size();
    double diag = 0;
    std::size_t ndiag = 0;
    for (const auto& [id, count] : active) {
        const double f = static_cast<double>(count) / span;
        r.per_cell.push_back({id, f});
        r.mean += f;
        if (id.first == id.second) diag += f, ++ndiag;
    }
    r.mean /= static_cast<double>(r.cells);
    r.diagonal_mean = ndiag ? diag / static_cast<double>(ndiag) : 0.0;
    return r;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cycle-level simulator for systolic GCD, Toeplitz and Jacobi arrays", "systolic"};
    app.fallthrough();
    app.require_subcommand(1);
    Global g;
    app.add_option("--seed", g.seed, "Seed for generated instances");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"human", "json"}));
    app.add_option("--trace", g.trace_path, "Write an NDJSON trace to FILE");
    app.add_option("--trace-stride", g.trace_stride, "Record every k-th tick")->check(CLI::PositiveNumber);

    PolyArgs pa;
    auto* poly = app.add_subcommand("polygcd", "Polynomial GCD over GF(p)");
    poly->add_option("--p", pa.p, "Prime modulus")->required();
    poly->add_option("--a", pa.a, "Coefficients of A, constant term first")->required();
    poly->add_option("--b", pa.b, "Coefficients of B, constant term first")->required();
    poly->add_option("--variant", pa.variant, "Cell program")->check(CLI::IsMember({"fig4", "appA"}));

    IntArgs ia;
    auto* ig = app.add_subcommand("intgcd", "Integer GCD");
    ig->add_option("--a", ia.a)->required();
    ig->add_option("--b", ia.b)->required();
    ig->add_option("--bits", ia.bits, "Bit bound n");
    ig->add_option("--mode", ia.mode)->check(CLI::IsMember({"serial", "precursor", "systolic"}));
    ig->add_flag("--four-n", ia.four_n, "Use 4n cells");

    ToeplitzArgs ta;
    auto* tp = app.add_subcommand("toeplitz", "Toeplitz linear system");
    tp->add_option("--n", ta.n, "Largest diagonal offset (order n+1)");
    tp->add_option("--bands", ta.bands, "File of a_-n..a_n");
    tp->add_option("--rhs", ta.rhs, "File of b_0..b_n");
    tp->add_option("--random", ta.random, "Generate a seeded instance with this n")->check(CLI::PositiveNumber);
    tp->add_option("--mode", ta.mode)->check(CLI::IsMember({"serial", "systolic"}));

    EigenArgs ea;
    auto* eg = app.add_subcommand("eigen", "Symmetric eigenvalues by parallel Jacobi");
    eg->add_option("--matrix", ea.matrix, "File: n then the lower triangle, row by row");
    eg->add_option("--random", ea.random, "Generate a seeded symmetric matrix of order N")->check(CLI::PositiveNumber);
    eg->add_option("--mode", ea.mode)->check(CLI::IsMember({"broadcast", "delayed"}));
    eg->add_option("--max-sweeps", ea.max_sweeps)->check(CLI::PositiveNumber);
    eg->add_flag("--vectors", ea.vectors, "Accumulate eigenvectors");

    VerifyArgs va;
    auto* vf = app.add_subcommand("verify", "Check random instances against the serial oracles");
    vf->add_option("family", va.family)->required()->check(CLI::IsMember({"polygcd", "intgcd", "toeplitz", "eigen"}));
    vf->add_option("--count", va.count);

    std::string trace_file;
    auto* ts = app.add_subcommand("trace-stats", "Per-cell utilisation of a trace");
    ts->add_option("file", trace_file)->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return usage_error;
    }

    try {
        if (*poly) return cmd_polygcd(g, pa, out);
        if (*ig) return cmd_intgcd(g, ia, out);
        if (*tp) return cmd_toeplitz(g, ta, out, err);
        if (*eg) return cmd_eigen(g, ea, out, err);
        if (*vf) return cmd_verify(g, va, out);
        if (*ts) return cmd_trace_stats(g, trace_file, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return numerical_breakdown;
    }
    return usage_error;
}

}  // namespace systolic::cli
