#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "flux/scenario.hpp"
#include "testworld.hpp"

namespace fs = std::filesystem;

namespace {

int run_cmd(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CliFixture {
  fs::path dir;
  fs::path scenario;

  CliFixture() {
    dir = fs::temp_directory_path() / ("fluxsim_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    flux::Scenario s = fluxtest::gap_scenario(61'000);
    s.horizon_ticks = 40;
    scenario = dir / "scenario.json";
    std::ofstream(scenario) << flux::scenario_to_json(s);
  }
  ~CliFixture() { fs::remove_all(dir); }

  std::string bin() const { return FLUXSIM_BIN; }
};

}  // namespace

TEST_CASE("single mode writes summary and series") {
  CliFixture f;
  fs::path out = f.dir / "single";
  int rc = run_cmd(f.bin() + " --scenario " + f.scenario.string() + " --mode single --out " +
                   out.string() + " --quiet");
  CHECK(rc == 0);
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "series.csv"));
  std::string csv = slurp(out / "series.csv");
  CHECK(csv.rfind("tick,mev_cum,settlements_finalized,mean_latency,utilization,share_price,"
                  "slippage_mean_bps\n",
                  0) == 0);
}

TEST_CASE("paired mode writes exactly three files") {
  CliFixture f;
  fs::path out = f.dir / "paired";
  int rc = run_cmd(f.bin() + " --scenario " + f.scenario.string() + " --mode paired --out " +
                   out.string() + " --quiet");
  CHECK(rc == 0);
  size_t files = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    (void)e;
    ++files;
  }
  CHECK(files == 3);
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "series.csv"));
  CHECK(fs::exists(out / "deltas.json"));
}

TEST_CASE("unknown flags exit with code 2 and usage text") {
  CliFixture f;
  int rc = run_cmd(f.bin() + " --scenario " + f.scenario.string() + " --frobnicate 2>" +
                   (f.dir / "err.txt").string());
  CHECK(rc == 2);
  std::string err = slurp(f.dir / "err.txt");
  CHECK(err.find("--help") != std::string::npos);
}

TEST_CASE("invalid scenarios exit with code 2 and a field diagnostic") {
  CliFixture f;
  fs::path bad = f.dir / "bad.json";
  std::string text = slurp(f.scenario);
  text.insert(text.rfind('}'), R"(, "mystery_knob": true)");
  std::ofstream(bad) << text;
  int rc = run_cmd(f.bin() + " --scenario " + bad.string() + " --mode single --out " +
                   (f.dir / "nope").string() + " 2>" + (f.dir / "err2.txt").string());
  CHECK(rc == 2);
  CHECK(slurp(f.dir / "err2.txt").find("mystery_knob") != std::string::npos);

  int rc2 = run_cmd(f.bin() + " --scenario " + (f.dir / "missing.json").string() +
                    " --mode single --out " + (f.dir / "nope").string() + " 2>/dev/null");
  CHECK(rc2 == 2);
}

TEST_CASE("identical invocations produce byte-identical outputs") {
  CliFixture f;
  fs::path a = f.dir / "a", b = f.dir / "b";
  REQUIRE(run_cmd(f.bin() + " --scenario " + f.scenario.string() + " --mode paired --out " +
                  a.string() + " --quiet") == 0);
  REQUIRE(run_cmd(f.bin() + " --scenario " + f.scenario.string() + " --mode paired --out " +
                  b.string() + " --quiet") == 0);
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(slurp(a / "series.csv") == slurp(b / "series.csv"));
  CHECK(slurp(a / "deltas.json") == slurp(b / "deltas.json"));
}

TEST_CASE("sweep emits per-seed summaries plus an aggregate, stable across parallelism") {
  CliFixture f;
  fs::path one = f.dir / "t1", many = f.dir / "t4";
  REQUIRE(run_cmd("FLUXLAYER_THREADS=1 " + f.bin() + " --scenario " + f.scenario.string() +
                  " --mode sweep --seeds 5 --out " + one.string() + " --quiet") == 0);
  REQUIRE(run_cmd("FLUXLAYER_THREADS=4 " + f.bin() + " --scenario " + f.scenario.string() +
                  " --mode sweep --seeds 5 --out " + many.string() + " --quiet") == 0);

  size_t summaries = 0;
  for (const auto& e : fs::directory_iterator(one))
    if (e.path().filename().string().rfind("summary_seed", 0) == 0) ++summaries;
  CHECK(summaries == 5);
  CHECK(fs::exists(one / "aggregate.json"));

  for (const auto& e : fs::directory_iterator(one)) {
    fs::path other = many / e.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(e.path()) == slurp(other));
  }

  // Seed lists are honored verbatim.
  fs::path listed = f.dir / "listed";
  REQUIRE(run_cmd(f.bin() + " --scenario " + f.scenario.string() +
                  " --mode sweep --seeds 9,3,5 --out " + listed.string() + " --quiet") == 0);
  CHECK(fs::exists(listed / "summary_seed9.json"));
  CHECK(fs::exists(listed / "summary_seed3.json"));
  CHECK(fs::exists(listed / "summary_seed5.json"));

  // Sweep without --seeds is a configuration error.
  CHECK(run_cmd(f.bin() + " --scenario " + f.scenario.string() + " --mode sweep --out " +
                (f.dir / "x").string() + " 2>/dev/null") == 2);
}

TEST_CASE("sweep aggregate matches an independent recomputation from the files") {
  CliFixture f;
  fs::path out = f.dir / "agg";
  REQUIRE(run_cmd(f.bin() + " --scenario " + f.scenario.string() +
                  " --mode sweep --seeds 8 --out " + out.string() + " --quiet") == 0);

  // Recompute from the per-seed summaries alone: exact rational mean from the
  // decimal strings, population stddev through the same double sqrt.
  std::vector<flux::Rational> mev;
  for (int i = 0; i < 8; ++i) {
    auto j = nlohmann::ordered_json::parse(
        slurp(out / ("summary_seed" + std::to_string(1 + i) + ".json")));
    auto v = flux::Rational::from_decimal(j.at("mev").at("captured_total").get<std::string>());
    REQUIRE(v.has_value());
    mev.push_back(*v);
  }
  flux::Rational mean;
  for (const auto& v : mev) mean += v;
  mean /= flux::Rational(static_cast<int64_t>(mev.size()));
  flux::Rational var;
  for (const auto& v : mev) var += (v - mean) * (v - mean);
  var /= flux::Rational(static_cast<int64_t>(mev.size()));
  char sd[64];
  std::snprintf(sd, sizeof sd, "%.9f", std::sqrt(var.to_double()));

  auto agg = nlohmann::ordered_json::parse(slurp(out / "aggregate.json"));
  CHECK(agg.at("runs").get<int>() == 8);
  CHECK(agg.at("mev_captured_total").at("mean").get<std::string>() == mean.to_decimal(9));
  CHECK(agg.at("mev_captured_total").at("stddev").get<std::string>() == sd);
}
