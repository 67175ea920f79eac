#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "epigrowth/pipeline.hpp"

using namespace epigrowth;
using namespace epigrowth::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("epigrowth_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

RunConfig fixture_inputs(const fs::path& dir, int metros, std::uint64_t seed) {
  RunConfig gen;
  gen.out = dir.string();
  gen.seed = seed;
  gen.fixture_metros = metros;
  gen.globals.mu = 0.02;
  cmd_gen_fixtures(gen);
  RunConfig cfg;
  cfg.cases = (dir / "cases.csv").string();
  cfg.metro_map = (dir / "metro_map.csv").string();
  cfg.out = dir.string();
  return cfg;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(EPIGROWTH_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("segment matches the stored report for three metros") {
  auto dir = scratch("golden");
  RunConfig cfg;
  cfg.cases = EPIGROWTH_TEST_DATA "/three_metros_cases.csv";
  cfg.metro_map = EPIGROWTH_TEST_DATA "/three_metros_map.csv";
  cfg.out = dir.string();
  cmd_segment(cfg);
  CHECK(slurp(dir / "protocol.csv") == slurp(EPIGROWTH_TEST_DATA "/three_metros_protocol.csv"));
  CHECK(slurp(dir / "periods.csv") == slurp(EPIGROWTH_TEST_DATA "/three_metros_periods.csv"));
}

TEST_CASE("emitted files read back unchanged") {
  auto dir = scratch("roundtrip");
  auto cfg = fixture_inputs(dir, 3, 4);
  cmd_segment(cfg);

  for (const char* name : {"periods.csv", "periods_truth.csv"}) {
    std::ifstream in(dir / name);
    auto sets = read_periods(in);
    std::ostringstream again;
    write_periods(again, sets);
    CHECK(again.str() == slurp(dir / name));
  }
  {
    std::ifstream in(dir / "cases.csv");
    auto loaded = load_cases(in);
    CHECK(loaded.warnings.empty());
    std::ostringstream again;
    write_cases(again, loaded.series);
    CHECK(again.str() == slurp(dir / "cases.csv"));
  }
  {
    std::ifstream in(dir / "weather.csv");
    std::ostringstream again;
    write_weather(again, load_weather(in));
    CHECK(again.str() == slurp(dir / "weather.csv"));
  }
  {
    std::ifstream in(dir / "inflow.csv");
    std::ostringstream again;
    write_inflow(again, read_inflow(in));
    CHECK(again.str() == slurp(dir / "inflow.csv"));
  }
  auto truth = json::parse(slurp(dir / "truth.json"));
  CHECK(truth.at("metros").size() == 3);
}

TEST_CASE("a metro without cases gets NA dates") {
  auto dir = scratch("zero");
  std::string cases = "date,region,count\n";
  for (Date d = Date(2020, 3, 1); d <= Date(2020, 6, 30); d += 1) {
    cases += d.iso() + ",quiet,0\n";
    cases += d.iso() + ",busy," + std::to_string(10 + (d - Date(2020, 3, 1))) + "\n";
  }
  spit(dir / "cases.csv", cases);
  spit(dir / "map.csv", "county,metro\nquiet,Quiet\nbusy,Busy\n");
  RunConfig cfg;
  cfg.cases = (dir / "cases.csv").string();
  cfg.metro_map = (dir / "map.csv").string();
  cfg.out = dir.string();
  auto res = cmd_segment(cfg);
  REQUIRE(res.rows.size() == 2);
  const auto& quiet = res.rows.back();
  CHECK(quiet.metro == "Quiet");
  CHECK_FALSE(quiet.first_case);
  CHECK_FALSE(quiet.protocol_followed);
  CHECK(quiet.diagnostic == "no positive counts");
  CHECK(slurp(dir / "protocol.csv").find("Quiet,NA,NA,no positive counts") != std::string::npos);
}

TEST_CASE("configuration and I/O failures carry their kind") {
  auto dir = scratch("errors");
  RunConfig cfg;
  cfg.cases = (dir / "absent.csv").string();
  cfg.metro_map = (dir / "absent_map.csv").string();
  cfg.out = dir.string();
  try {
    cmd_segment(cfg);
    FAIL("missing input accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
  cfg.window = {Date(2020, 6, 1), Date(2020, 5, 1)};
  try {
    cmd_segment(cfg);
    FAIL("empty window accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
  RunConfig sim;
  sim.out = dir.string();
  sim.model = Model::tourism;
  sim.beta = 1e-7;
  sim.gamma = 0.05;
  CHECK_THROWS_AS(cmd_simulate(sim), Error);
}

TEST_CASE("a single-point grid echoes that point") {
  auto dir = scratch("single");
  auto cfg = fixture_inputs(dir, 1, 2);
  cfg.periods = (dir / "periods_truth.csv").string();
  cfg.globals.mu = 0.02;
  cfg.beta_grid = GridAxis{2.5e-7, 2.5e-7, 1e-8};
  cfg.gamma_grid = GridAxis{0.07, 0.07, 0.01};
  auto res = cmd_fit(cfg);
  const auto& m = res.report.at("metros").at(0);
  REQUIRE(m.at("status") == "ok");
  for (const char* model : {"delayed", "reinfect"})
    for (const auto& p : m.at("models").at(model).at("periods")) {
      CHECK(p.at("beta").get<double>() == 2.5e-7);
      CHECK(p.at("gamma").get<double>() == 0.07);
    }
  auto table = slurp(dir / "fit_table.csv");
  CHECK(table.rfind("metro,only_delayed_pct,reinfected_pct\nmetro_01,", 0) == 0);
}

TEST_CASE("delayed with zero delays and no reinfection writes the original trajectory") {
  auto a = scratch("orig"), b = scratch("delay0");
  RunConfig cfg;
  cfg.beta = 3e-7;
  cfg.gamma = 0.1;
  cfg.i0 = 40;
  cfg.globals = {0, 0, 0.0, 0.0};
  cfg.model = Model::original;
  cfg.out = a.string();
  cmd_simulate(cfg);
  cfg.model = Model::delayed;
  cfg.out = b.string();
  cmd_simulate(cfg);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "plot_sim.csv") == slurp(b / "plot_sim.csv"));
}

TEST_CASE("simulate reuses fitted parameters and conserves people") {
  auto dir = scratch("simfit");
  auto cfg = fixture_inputs(dir, 1, 9);
  cfg.periods = (dir / "periods_truth.csv").string();
  cfg.globals.mu = 0.02;
  cmd_fit(cfg);
  cfg.fit_report = (dir / "fit_report.json").string();
  cfg.model = Model::reinfect;
  auto sim = cmd_simulate(cfg);
  CHECK(sim.metro == "metro_01");
  CHECK(sim.max_conservation_deviation < 1e-12);
  CHECK(fs::exists(dir / "plot_data.csv"));
  auto rows = slurp(dir / "trajectory.csv");
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 1 + 122);
}

TEST_CASE("correlate writes every table") {
  auto dir = scratch("correlate");
  auto cfg = fixture_inputs(dir, 11, 3);
  cfg.periods = (dir / "periods_truth.csv").string();
  cfg.demographics = (dir / "demographics.csv").string();
  cfg.weather = (dir / "weather.csv").string();
  auto res = cmd_correlate(cfg);
  REQUIRE(res.demographics);
  CHECK(res.weather.size() == 3);
  for (const char* f : {"table3_demographics.csv", "table4_weather_type.csv", "table5_high_temp.csv",
                        "table6_low_temp.csv", "correlate_report.json"})
    CHECK(fs::exists(dir / f));
  // metro_01 has only sunny days in its first period
  auto* cell = res.weather[0].p_cell("metro_01", "P1");
  REQUIRE(cell);
  CHECK_FALSE(cell->value);
  cfg.study = "astrology";
  CHECK_THROWS_AS(cmd_correlate(cfg), Error);
}

TEST_CASE("fixture generation is deterministic") {
  auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  fixture_inputs(a, 4, 21);
  fixture_inputs(b, 4, 21);
  fixture_inputs(c, 4, 22);
  for (const char* f : {"cases.csv", "metro_map.csv", "periods_truth.csv", "demographics.csv", "weather.csv",
                        "inflow.csv", "truth.json"})
    CHECK(slurp(a / f) == slurp(b / f));
  CHECK(slurp(a / "cases.csv") != slurp(c / "cases.csv"));
}

TEST_CASE("the command-line tool maps failures to exit codes") {
  auto dir = scratch("cli");
  std::string out = " --out " + dir.string();
  CHECK(run_cli("gen-fixtures --seed 5 --fixture-metros 2" + out) == 0);
  std::string inputs = " --cases " + (dir / "cases.csv").string() + " --metro-map " + (dir / "metro_map.csv").string();
  CHECK(run_cli("segment" + inputs + out) == 0);
  CHECK(fs::exists(dir / "protocol.csv"));

  CHECK(run_cli("segment --cases " + (dir / "nope.csv").string() + " --metro-map " +
                (dir / "metro_map.csv").string() + out) == 3);
  spit(dir / "bad.csv", "date,region,count\n2020-03-01,a,lots\n");
  CHECK(run_cli("segment --cases " + (dir / "bad.csv").string() + " --metro-map " +
                (dir / "metro_map.csv").string() + out) == 2);
  CHECK(run_cli("simulate --model nonsense --beta 1e-7 --gamma 0.1" + out) == 4);
  CHECK(run_cli("segment --no-such-flag" + out) == 4);
  CHECK(run_cli("--help") == 0);
}
