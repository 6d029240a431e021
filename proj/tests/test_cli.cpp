#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "systolic/cli.hpp"

using namespace systolic::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "systolic_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

UtilisationReport stats_of(const fs::path& p) {
    std::ifstream in(p);
    return trace_stats(in);
}

}  // namespace

TEST_CASE("polygcd") {
    auto r = run({"polygcd", "--p", "7", "--a", "6,5,1", "--b", "3,0,1"});
    CHECK(r.code == ok);
    CHECK(r.out.find("gcd 2,1 mod 7") != std::string::npos);
    auto j = run({"--format", "json", "polygcd", "--p", "2", "--a", "1,1,1,1", "--b", "1,0,1", "--variant", "appA"});
    REQUIRE(j.code == ok);
    auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["gcd"] == nlohmann::json::array({1, 0, 1}));
    CHECK(doc["cells"] == 6);
    CHECK(run({"polygcd", "--p", "8", "--a", "1", "--b", "1"}).code == usage_error);
    CHECK(run({"polygcd", "--p", "7", "--a", "0", "--b", "0"}).code == usage_error);
    CHECK(run({"polygcd", "--p", "7", "--a", "1", "--b", "1", "--variant", "fig9"}).code == usage_error);
}

TEST_CASE("intgcd") {
    for (std::string mode : {"serial", "precursor", "systolic"}) {
        auto r = run({"intgcd", "--a", "12", "--b", "18", "--mode", mode});
        CHECK(r.code == ok);
        CHECK(r.out.rfind("gcd 6\n", 0) == 0);
    }
    auto s = run({"--format", "json", "intgcd", "--a", "1000", "--b", "64", "--bits", "12"});
    REQUIRE(s.code == ok);
    auto doc = nlohmann::json::parse(s.out);
    CHECK(doc["gcd"] == 8);
    CHECK(doc["cells"] == 39);
    CHECK(run({"intgcd", "--a", "0", "--b", "5"}).code == usage_error);
    CHECK(run({"intgcd", "--a", "100", "--b", "5", "--bits", "3"}).code == usage_error);
}

TEST_CASE("toeplitz") {
    auto bands = scratch("bands.txt"), rhs = scratch("rhs.txt");
    write_file(bands, "0\n2\n4\n1\n0\n");
    write_file(rhs, "5\n7\n6\n");
    for (std::string mode : {"serial", "systolic"}) {
        auto r = run({"--format", "json", "toeplitz", "--n", "2", "--bands", bands.string(), "--rhs", rhs.string(),
                      "--mode", mode});
        REQUIRE(r.code == ok);
        auto x = nlohmann::json::parse(r.out)["x"];
        REQUIRE(x.size() == 3);
        const double x0 = x[0], x1 = x[1], x2 = x[2];
        CHECK(4 * x0 + x1 == doctest::Approx(5));
        CHECK(2 * x0 + 4 * x1 + x2 == doctest::Approx(7));
        CHECK(2 * x1 + 4 * x2 == doctest::Approx(6));
    }
    CHECK(run({"toeplitz", "--n", "3", "--bands", bands.string(), "--rhs", rhs.string()}).code == usage_error);
    CHECK(run({"toeplitz", "--bands", bands.string()}).code == usage_error);
    CHECK(run({"toeplitz", "--random", "5"}).code == ok);

    write_file(bands, "1\n2\n0\n3\n1\n");
    auto sing = run({"toeplitz", "--bands", bands.string(), "--rhs", rhs.string()});
    CHECK(sing.code == numerical_breakdown);
    CHECK(sing.err.find("singular") != std::string::npos);
}

TEST_CASE("eigen") {
    auto m = scratch("matrix.txt");
    write_file(m, "2\n0\n1 0\n");
    auto r = run({"--format", "json", "eigen", "--matrix", m.string(), "--vectors"});
    REQUIRE(r.code == ok);
    auto doc = nlohmann::json::parse(r.out);
    std::vector<double> ev = doc["eigenvalues"];
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(-1));
    CHECK(ev[1] == doctest::Approx(1));
    CHECK(doc["eigenvectors"].size() == 2);
    CHECK(run({"eigen", "--random", "6", "--mode", "delayed"}).code == ok);
    CHECK(run({"eigen", "--random", "12", "--max-sweeps", "1"}).code == numerical_breakdown);
    write_file(m, "3\n1 2\n");
    CHECK(run({"eigen", "--matrix", m.string()}).code == usage_error);
    CHECK(run({"eigen"}).code == usage_error);
}

TEST_CASE("verify") {
    auto p = run({"verify", "polygcd", "--count", "10", "--seed", "1"});
    CHECK(p.code == ok);
    CHECK(p.out.find("polygcd 10/10 pass") != std::string::npos);
    CHECK(run({"verify", "intgcd", "--count", "10"}).code == ok);
    CHECK(run({"verify", "eigen", "--count", "3"}).code == ok);

    auto t = run({"verify", "toeplitz", "--count", "5"});
    CHECK(t.code == ok);
    CHECK(t.out.find("expected-singular pass") != std::string::npos);
    CHECK(t.out.find("toeplitz 6/6 pass") != std::string::npos);

    auto bad = run({"verify", "sorting"});
    CHECK(bad.code == usage_error);
    CHECK(run({}).code == usage_error);
    CHECK(run({"frobnicate"}).code == usage_error);
}

TEST_CASE("same seed, same bytes") {
    for (std::string family : {"polygcd", "intgcd", "toeplitz", "eigen"}) {
        auto t1 = scratch(family + "1.ndjson"), t2 = scratch(family + "2.ndjson");
        auto a = run({"--seed", "42", "--format", "json", "--trace", t1.string(), "verify", family, "--count", "3"});
        auto b = run({"--seed", "42", "--format", "json", "--trace", t2.string(), "verify", family, "--count", "3"});
        CHECK(a.code == ok);
        CHECK(a.out == b.out);
        CHECK_FALSE(read_file(t1).empty());
        CHECK(read_file(t1) == read_file(t2));
        auto c = run({"--seed", "43", "--format", "json", "verify", family, "--count", "3"});
        CHECK(c.out != a.out);
    }
}

TEST_CASE("trace statistics") {
    std::istringstream empty("");
    auto e = trace_stats(empty);
    CHECK(e.cells == 0);
    CHECK(e.mean == 0.0);
    CHECK(e.diagonal_mean == 0.0);

    std::istringstream junk("{\"tick\":0}\n");
    CHECK_THROWS_AS(trace_stats(junk), std::runtime_error);
    auto junk_file = scratch("junk.ndjson");
    write_file(junk_file, "not json\n");
    CHECK(run({"trace-stats", junk_file.string()}).code == usage_error);

    auto tt = scratch("toeplitz16.ndjson");
    auto bands = scratch("bands16.txt"), rhs = scratch("rhs16.txt");
    REQUIRE(run({"--trace", tt.string(), "toeplitz", "--random", "16"}).code == ok);
    auto ts = stats_of(tt);
    CHECK(ts.cells == 17);
    CHECK(ts.mean >= 0.20);
    CHECK(ts.mean <= 0.30);

    auto et = scratch("jacobi16.ndjson");
    REQUIRE(run({"--trace", et.string(), "eigen", "--random", "16", "--mode", "delayed"}).code == ok);
    auto es = stats_of(et);
    CHECK(es.cells == 64);
    CHECK(es.diagonal_mean >= 0.28);
    CHECK(es.diagonal_mean <= 0.38);

    auto r = run({"trace-stats", et.string()});
    CHECK(r.code == ok);
    CHECK(r.out.find("cells 64") != std::string::npos);
}
