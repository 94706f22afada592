#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <random>
#include <sstream>

#include "stadium/error.hpp"
#include "stadium/serialize.hpp"
#include "stadium_cli/cli.hpp"

using namespace stadium;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("stadium_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path operator/(const std::string& s) const { return path / s; }
};

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value) {
      setenv("STADIUM_THREADS", value, 1);
    } else {
      unsetenv("STADIUM_THREADS");
    }
  }
  ~EnvGuard() { unsetenv("STADIUM_THREADS"); }
};

// lambda_{1,2} = 20 -+ sqrt((a-1)^2 + 0.01): one avoided crossing at a = 1, gap 0.2
void write_fixture(const fs::path& path) {
  SweepConfig cfg;
  cfg.a_values = a_range(0.0, 2.0, 0.25);
  cfg.classes = {SymmetryClass::EE};
  cfg.spectrum.k = 3;
  cfg.spectrum.h = 0.25;
  CurveTable t(cfg.a_values, cfg.classes, 3);
  for (std::size_t j = 0; j < cfg.a_values.size(); ++j) {
    const double d = std::sqrt((cfg.a_values[j] - 1.0) * (cfg.a_values[j] - 1.0) + 0.01);
    t.set(SymmetryClass::EE, 0, j, 20.0 - d);
    t.set(SymmetryClass::EE, 1, j, 20.0 + d);
    t.set(SymmetryClass::EE, 2, j, 40.0);
  }
  write_file_atomic(path, curve_table_to_json(t, cfg, make_provenance(config_hash(cfg))));
}

}  // namespace

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_AS(cli::parse_run_config("{", {}), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_run_config(R"({"grid": {"h": 0.1, "spacing": 2}})", {}), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_run_config(R"({"solver": {"k": -1}})", {}), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_run_config(R"({"solver": {"k": "8"}})", {}), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_run_config(R"({"classes": ["EE", "XY"]})", {}), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_run_config(R"({"geometry": {"shape": "circle"}})", {}), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_run_config(R"({"geometry": {"a": -1}})", {}), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_run_config(R"({"sweep": {"a_values": [0], "step": 1}})", {}), cli::ConfigError);

  const auto c = cli::parse_run_config(
      R"({"geometry": {"a": 0.5}, "grid": {"h": 0.05, "mode": "full"}, "classes": ["OO", "EE"],
          "solver": {"k": 3, "seed": 9}, "sweep": {"a_min": 0, "a_max": 0.1, "step": 0.02},
          "analysis": {"delta": 0.05}, "output": "x", "threads": 2})",
      {});
  CHECK(std::get<StadiumGeometry>(c.geometry).a() == 0.5);
  CHECK(c.h == 0.05);
  CHECK(c.mode == GridMode::FullDomain);
  CHECK(c.classes == std::vector<SymmetryClass>{SymmetryClass::OO, SymmetryClass::EE});
  CHECK(c.k == 3);
  CHECK(c.seed == 9);
  CHECK(c.a_values.size() == 6);
  CHECK(c.a_values[3] == 0.06);
  CHECK(c.delta == 0.05);
  CHECK(c.threads == 2);

  // output and threads never change the science hash
  auto d = c;
  d.output = "elsewhere";
  d.threads = 7;
  CHECK(cli::run_hash(c) == cli::run_hash(d));
  d.k = 4;
  CHECK(cli::run_hash(c) != cli::run_hash(d));
}

TEST_CASE("format_a") {
  CHECK(cli::format_a(0.0) == "0");
  CHECK(cli::format_a(1.0) == "1");
  CHECK(cli::format_a(0.52) == "0.52");
  CHECK(cli::format_a(0.785) == "0.785");
  CHECK(cli::format_a(1.23456) == "1.2346");
}

TEST_CASE("malformed config exits 1 and writes nothing") {
  TempDir dir;
  write_file_atomic(dir / "bad.json", "{\"grid\": {\"h\": }");
  const auto r = run({"solve", "--config", (dir / "bad.json").string(), "--out", (dir / "out").string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("config") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));

  write_file_atomic(dir / "unknown.json", R"({"solver": {"kk": 3}})");
  CHECK(run({"solve", "--config", (dir / "unknown.json").string(), "--out", (dir / "out").string()}).code ==
        cli::kExitConfig);
  CHECK(run({"solve", "--h", "-0.1", "--out", (dir / "out").string()}).code == cli::kExitConfig);
  CHECK(run({"solve", "--class", "QQ", "--out", (dir / "out").string()}).code == cli::kExitConfig);
  CHECK(run({"solve", "--mode", "half", "--out", (dir / "out").string()}).code == cli::kExitConfig);
  CHECK(run({"solve", "--a", "0", "--h", "3", "--out", (dir / "out").string()}).code == cli::kExitConfig);
  CHECK(run({"solve", "--no-such-flag"}).code == cli::kExitConfig);
  CHECK(run({}).code == cli::kExitConfig);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("help and version") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("Exit codes") != std::string::npos);
  CHECK(r.out.find("STADIUM_THREADS") != std::string::npos);
  CHECK(run({"--version"}).code == 0);
  CHECK(run({"sweep", "--help"}).code == 0);
}

TEST_CASE("solve output files and flag precedence") {
  TempDir dir;
  write_file_atomic(dir / "cfg.json", R"({"geometry": {"a": 1}, "grid": {"h": 0.0625}, "solver": {"k": 5},
                                          "output": "ignored"})");
  const auto r = run({"solve", "--config", (dir / "cfg.json").string(), "--k", "3", "--class", "EE,OO", "--out",
                      (dir / "out").string()});
  REQUIRE(r.code == 0);
  for (const char* stem : {"ee1_a1", "ee2_a1", "ee3_a1", "oo1_a1", "oo3_a1"}) {
    for (const char* ext : {".bin", ".csv", ".svg"}) CHECK(fs::exists(dir / "out" / (std::string(stem) + ext)));
  }
  CHECK_FALSE(fs::exists(dir / "out" / "ee4_a1.bin"));
  CHECK_FALSE(fs::exists(dir / "ignored"));

  const json doc = json::parse(read_file(dir / "out" / "eigenvalues.json"));
  CHECK(doc["config"]["solver"]["k"] == 3);
  CHECK(doc["config"]["grid"]["h"] == 0.0625);
  CHECK(doc["config_hash"].get<std::string>().size() == 16);
  REQUIRE(doc["spectra"].size() == 2);
  for (const auto& s : doc["spectra"]) {
    const auto l = s["lambdas"].get<std::vector<double>>();
    REQUIRE(l.size() == 3);
    CHECK(std::is_sorted(l.begin(), l.end()));
    CHECK(s["converged"] == true);
  }
  CHECK(doc["spectra"][0]["class"] == "EE");

  // the dump carries the same provenance and reloads onto the same lattice
  const FieldDump dump = parse_field_binary(read_file(dir / "out" / "ee1_a1.bin"));
  REQUIRE(dump.provenance.has_value());
  CHECK(dump.provenance->config_hash == doc["config_hash"].get<std::string>());
  const ScalarField f = field_from_dump(dump);
  CHECK(f.grid().h() == 0.0625);
  CHECK(read_file(dir / "out" / "ee1_a1.csv").find(doc["config_hash"].get<std::string>()) != std::string::npos);
  CHECK(read_file(dir / "out" / "ee1_a1.svg").find(doc["config_hash"].get<std::string>()) != std::string::npos);
}

TEST_CASE("solve: circle ground state") {
  TempDir dir;
  const auto r = run({"solve", "--a", "0", "--k", "1", "--out", dir.path.string()});
  REQUIRE(r.code == 0);
  const json doc = json::parse(read_file(dir / "eigenvalues.json"));
  const double l1 = doc["spectra"][0]["lambdas"][0];
  CHECK(std::abs(l1 - 5.783185962946784) / 5.783185962946784 < 0.02);
  CHECK(fs::exists(dir / "ee1_a0.bin"));
}

TEST_CASE("solve: rectangle names carry no a") {
  TempDir dir;
  REQUIRE(run({"solve", "--lx", "1", "--ly", "1", "--mode", "full", "--h", "0.125", "--k", "2", "--out",
               dir.path.string()})
              .code == 0);
  CHECK(fs::exists(dir / "ee1.bin"));
  CHECK(run({"solve", "--lx", "1", "--out", dir.path.string()}).code == cli::kExitConfig);
  CHECK(run({"solve", "--lx", "1", "--ly", "1", "--a", "1", "--out", dir.path.string()}).code == cli::kExitConfig);
}

TEST_CASE("sweep, resume and determinism") {
  TempDir dir;
  const std::vector<std::string> base = {"sweep", "--a-values", "0,1,2", "--class", "EE", "--k", "5", "--h", "0.0625"};
  auto args = base;
  args.insert(args.end(), {"--out", (dir / "one").string()});
  const auto first = run(args);
  REQUIRE(first.code == 0);
  CHECK(first.out.find("3 points, 3 computed, 0 cached, 0 failed") != std::string::npos);

  const std::string csv = read_file(dir / "one" / "curves.csv");
  std::size_t rows = 0;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#' && line.rfind("a,", 0) != 0) ++rows;
  }
  CHECK(rows == 15);
  CHECK(fs::exists(dir / "one" / "curves.json"));
  CHECK(fs::exists(dir / "one" / "correlation_EE.svg"));

  const auto again = run(args);
  REQUIRE(again.code == 0);
  CHECK(again.out.find("3 points, 0 computed, 3 cached, 0 failed") != std::string::npos);
  CHECK(read_file(dir / "one" / "curves.csv") == csv);

  args = base;
  args.insert(args.end(), {"--out", (dir / "two").string(), "--threads", "2"});
  REQUIRE(run(args).code == 0);
  CHECK(read_file(dir / "two" / "curves.csv") == csv);
  CHECK(read_file(dir / "two" / "curves.json") == read_file(dir / "one" / "curves.json"));

  // a changed science parameter must not reuse cached points
  args = base;
  args[6] = "4";
  args.insert(args.end(), {"--out", (dir / "one").string()});
  const auto changed = run(args);
  REQUIRE(changed.code == 0);
  CHECK(changed.out.find("3 computed, 0 cached") != std::string::npos);
}

TEST_CASE("sweep with failed points exits 2 and keeps the rest") {
  TempDir dir;
  const auto r = run({"sweep", "--a-values", "0,3", "--h", "1.5", "--k", "1", "--out", dir.path.string()});
  CHECK(r.code == cli::kExitPartial);
  CHECK(r.out.find("1 failed") != std::string::npos);
  const auto stored = curve_table_from_json(read_file(dir / "curves.json"));
  CHECK_FALSE(stored.table.lambda(SymmetryClass::EE, 0, 0).has_value());
  CHECK(stored.table.lambda(SymmetryClass::EE, 0, 1).has_value());
  CHECK(run({"sweep", "--out", dir.path.string()}).code == cli::kExitConfig);
}

TEST_CASE("crossings on an injected table") {
  TempDir dir;
  write_fixture(dir / "curves.json");
  const auto r = run({"crossings", "--detect-only", "--out", dir.path.string()});
  REQUIRE(r.code == 0);
  const auto reports = crossings_from_json(read_file(dir / "crossings.json"));
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].symmetry == SymmetryClass::EE);
  CHECK(reports[0].lower == 0);
  CHECK(reports[0].a_star == 1.0);
  CHECK(reports[0].min_gap == doctest::Approx(0.2));
  CHECK(reports[0].bracket_lo == 0.75);
  CHECK(reports[0].bracket_hi == 1.25);
  CHECK(reports[0].prominence > 1.0);

  const json doc = json::parse(read_file(dir / "crossings.json"));
  CHECK(doc[0]["lower_curve"] == 1);
  CHECK(doc[0]["upper_curve"] == 2);
  const auto stored = curve_table_from_json(read_file(dir / "curves.json"));
  CHECK(doc[0]["config_hash"] == stored.provenance.config_hash);

  const auto none = run({"crossings", "--detect-only", "--min-prominence", "5", "--out", dir.path.string()});
  CHECK(none.code == cli::kExitNoCrossings);
  CHECK(json::parse(read_file(dir / "crossings.json")).empty());

  CHECK(run({"crossings", "--out", (dir / "missing").string()}).code == cli::kExitConfig);
  CHECK(run({"crossings", "--delta", "0", "--out", dir.path.string()}).code == cli::kExitConfig);
}

TEST_CASE("crossings refine and swap on a real sweep") {
  TempDir dir;
  // coarse EE sweep with the first EE crossing inside [0.6, 1.0]
  REQUIRE(run({"sweep", "--a-min", "0.6", "--a-max", "1", "--step", "0.05", "--h", "0.03125", "--k", "5", "--out",
               dir.path.string()})
              .code == 0);
  const auto r = run({"crossings", "--min-prominence", "0.1", "--delta", "0.05", "--out", dir.path.string()});
  REQUIRE(r.code == 0);
  const auto reports = crossings_from_json(read_file(dir / "crossings.json"));
  REQUIRE_FALSE(reports.empty());
  const auto& c = reports.front();
  CHECK(c.refined);
  CHECK(c.a_star > 0.6);
  CHECK(c.a_star < 1.0);
  CHECK(c.swap.has_value());
  const std::string v = cli::format_a(c.a_star);
  const std::string pair = std::to_string(c.lower + 1) + "_" + std::to_string(c.lower + 2);
  CHECK(fs::exists(dir / ("sumdiff_" + pair + "_a" + v + "_plus.svg")));
  CHECK(fs::exists(dir / ("sumdiff_" + pair + "_a" + v + "_minus.svg")));
  CHECK(fs::exists(dir / ("ee" + std::to_string(c.lower + 1) + "_a" + v + ".svg")));
}

TEST_CASE("render") {
  TempDir dir;
  REQUIRE(run({"solve", "--a", "0.5", "--h", "0.0625", "--k", "2", "--out", dir.path.string()}).code == 0);
  auto r = run({"render", "--field", (dir / "ee2_a0.5.bin").string(), "--levels", "0", "--svg",
                (dir / "nodal.svg").string()});
  REQUIRE(r.code == 0);
  const std::string svg = read_file(dir / "nodal.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<path") != std::string::npos);

  REQUIRE(run({"sweep", "--a-values", "0,0.5", "--k", "2", "--h", "0.125", "--out", dir.path.string()}).code == 0);
  r = run({"render", "--curves", (dir / "curves.json").string(), "--curve", "2", "--svg",
           (dir / "curve2.svg").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "curve2.svg"));
  CHECK(run({"render", "--curves", (dir / "curves.json").string(), "--curve", "9", "--svg",
             (dir / "x.svg").string()})
            .code == cli::kExitConfig);
  CHECK(run({"render", "--svg", (dir / "x.svg").string()}).code == cli::kExitConfig);
  CHECK(run({"render", "--field", (dir / "ee1_a0.5.bin").string(), "--curves", (dir / "curves.json").string(),
             "--svg", (dir / "x.svg").string()})
            .code == cli::kExitConfig);
  write_file_atomic(dir / "junk.bin", "junk");
  CHECK(run({"render", "--field", (dir / "junk.bin").string(), "--svg", (dir / "x.svg").string()}).code ==
        cli::kExitConfig);
}

TEST_CASE("STADIUM_THREADS") {
  TempDir dir;
  const std::vector<std::string> args = {"sweep", "--a-values", "0", "--k", "1", "--h", "0.25", "--out",
                                         dir.path.string()};
  {
    EnvGuard env("2");
    CHECK(run(args).code == 0);
  }
  {
    EnvGuard env("two");
    CHECK(run(args).code == cli::kExitConfig);
  }
  {
    EnvGuard env("0");
    CHECK(run(args).code == cli::kExitConfig);
    auto with_flag = args;
    with_flag.insert(with_flag.end(), {"--threads", "1"});
    CHECK(run(with_flag).code == 0);
  }
}

TEST_CASE("validate catches a broken operator") {
  cli::ValidationOptions good;
  good.quick = true;
  std::ostringstream out;
  CHECK(cli::cmd_validate(good, out) == 0);
  CHECK(out.str().find("FAIL") == std::string::npos);

  cli::ValidationOptions bad = good;
  bad.assembler = [](const Grid& g) {
    const SparseSymMatrix m = assemble_laplacian(g);
    std::vector<double> v(m.values().begin(), m.values().end());
    for (double& x : v) x *= 1.01;
    return SparseSymMatrix(m.n(), {m.row_ptr().begin(), m.row_ptr().end()}, {m.col_idx().begin(), m.col_idx().end()},
                           std::move(v), m.h());
  };
  std::ostringstream bad_out;
  CHECK(cli::cmd_validate(bad, bad_out) == cli::kExitValidation);
  const auto results = cli::run_validation(bad);
  CHECK_FALSE(results[0].passed);
  CHECK(bad_out.str().find("FAIL") != std::string::npos);
}
