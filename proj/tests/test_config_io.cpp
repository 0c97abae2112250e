#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ecosub/config.hpp"
#include "ecosub/errors.hpp"
#include "ecosub/io.hpp"
#include "ecosub/jobs.hpp"

using namespace ecosub;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("ecosub_test_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("shipped presets load") {
    auto names = preset_names();
    for (const char* n : {"calibration", "figure2", "figure3", "figure4"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    auto f3 = load_preset("figure3");
    CHECK(f3.kind == JobKind::Simulate);
    CHECK(f3.model.gamma == 0.6);
    CHECK(f3.model.delta == 0.95);
    CHECK(f3.model.m_min == 0.35);
    CHECK(f3.simulation.horizon == 50);
    auto f4 = load_preset("figure4");
    CHECK(f4.market.a == 100.0);
    CHECK(f4.market.b == 1.0);
    CHECK(f4.market.mc == 20.0);
    CHECK(load_preset("figure2").kind == JobKind::Sweep);
    CHECK_THROWS_AS(load_preset("nope"), ConfigError);
}

TEST_CASE("overrides merge over the preset key by key") {
    auto c = parse_config("preset: calibration\nmodel:\n  delta: 0.9\n");
    CHECK(c.model.delta == 0.9);
    CHECK(c.model.gamma == 0.6);
    CHECK(c.solver.expectation == Expectation::Convolution);
    // a different psi kind replaces the whole spec
    auto l = parse_config("preset: calibration\npsi:\n  kind: logistic\n  scale: 2\n");
    REQUIRE(std::holds_alternative<Logistic>(l.psi.v));
    CHECK(std::get<Logistic>(l.psi.v).scale == 2.0);
    auto cap = parse_config("psi:\n  kind: capped\n  cap: 0.1\n  inner:\n    kind: power_affine\n    lin: 0.2\n");
    REQUIRE(std::holds_alternative<Capped>(cap.psi.v));
    CHECK(psi_value(cap.psi, 1.0) == doctest::Approx(0.1));
}

TEST_CASE("config errors carry a location or a field name") {
    CHECK_THROWS_WITH_AS(parse_config("model:\n  gama: 0.5\n"), doctest::Contains("line 2"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("model:\n  gamma: abc\n"), doctest::Contains("model.gamma"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("model: [1, 2\n"), doctest::Contains("line"), ConfigError);
    CHECK_THROWS_AS(parse_config("job: dance\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("model:\n  delta: 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("psi:\n  kind: power_affine\n  exp: 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("preset: missing\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("job: sweep\nsweep:\n  lo: 2\n  hi: 1\n"), ConfigError);
}

TEST_CASE("s_max defaults to twice the cost") {
    auto c = parse_config("model:\n  cost: 3\n");
    CHECK(c.model.s_max == 6.0);
}

TEST_CASE("config hash is canonical") {
    auto a = parse_config("model:\n  gamma: 0.6\n  delta: 0.95\n");
    auto b = parse_config("model:\n  delta: 0.95\n  gamma: 0.60\n");
    CHECK(config_hash(a) == config_hash(b));
    auto c = parse_config("model:\n  delta: 0.9\n");
    CHECK(config_hash(a) != config_hash(c));
    CHECK(config_hash(a).size() == 16);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("job names round trip") {
    for (JobKind k : {JobKind::Solve, JobKind::Simulate, JobKind::Deviation, JobKind::Sweep,
                      JobKind::Region, JobKind::Welfare, JobKind::Signal, JobKind::Check})
        CHECK(parse_job_name(job_name(k)) == k);
    CHECK_FALSE(parse_job_name("plot"));
}

TEST_CASE("number formatting round trips and folds negative zero") {
    for (double x : {0.1, 1.0 / 3, 1e-300, 123456.789, -2.5})
        CHECK(std::stod(fmt_double(x)) == x);
    CHECK(fmt_double(-0.0) == "0");
    CHECK(fmt_double(0.5) == "0.5");
}

TEST_CASE("csv writer enforces the column count") {
    CsvWriter w({"a", "b"});
    w.row({"1", "2"});
    CHECK(w.str() == "a,b\n1,2\n");
    CHECK_THROWS_AS(w.row({"1"}), IoError);
}

TEST_CASE("atomic write leaves no temporary file") {
    auto d = scratch("atomic");
    write_file_atomic(d / "x.txt", "hello");
    CHECK(slurp(d / "x.txt") == "hello");
    CHECK_FALSE(fs::exists(d / "x.txt.tmp"));
    fs::remove_all(d);
}

TEST_CASE("welfare job writes its files and a manifest") {
    auto d = scratch("welfare");
    auto m = run_job(load_preset("figure4"), d);
    CHECK(m.exit_code == 0);
    CHECK(m.status == "ok");
    for (const char* f : {"regimes.csv", "welfare.json", "manifest.json", "config.json"})
        CHECK(fs::exists(d / f));
    auto manifest = nlohmann::json::parse(slurp(d / "manifest.json"));
    CHECK(manifest["config_hash"] == config_hash(load_preset("figure4")));
    CHECK_FALSE(manifest.contains("wall_clock_seconds"));
    auto regimes = slurp(d / "regimes.csv");
    CHECK(regimes.find("involution,90,10,4050,-900,900,50") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("wall-clock time is recorded only on request") {
    auto d = scratch("timing");
    RunOptions o;
    o.timing = true;
    run_job(load_preset("figure4"), d, o);
    auto manifest = nlohmann::json::parse(slurp(d / "manifest.json"));
    CHECK(manifest.contains("wall_clock_seconds"));
    fs::remove_all(d);
}

TEST_CASE("non-convergence maps to its exit code") {
    auto c = parse_config("preset: calibration\nsolver:\n  max_iter: 2\n");
    auto d = scratch("nc");
    auto m = run_job(c, d);
    CHECK(m.exit_code == kExitNotConverged);
    CHECK(m.status == "not-converged");
    CHECK(fs::exists(d / "solution.csv"));
    fs::remove_all(d);
}

TEST_CASE("solve output is byte-identical across runs") {
    auto c = parse_config("preset: calibration\nsolver:\n  grid_n: 101\n  action_n: 51\n");
    auto a = scratch("det_a"), b = scratch("det_b");
    run_job(c, a);
    run_job(c, b);
    for (const char* f : {"solution.csv", "summary.json", "manifest.json"})
        CHECK(slurp(a / f) == slurp(b / f));
    fs::remove_all(a);
    fs::remove_all(b);
}
