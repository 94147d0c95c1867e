// fluxsim: batch front-end for the cross-chain liquidity simulator.
//
//   fluxsim --scenario s.json --mode single --out ./results
//   fluxsim --scenario s.json --mode paired --out ./results
//   fluxsim --scenario s.json --mode sweep --seeds 32 --out ./results
//
// Exit codes: 0 success, 1 runtime error, 2 configuration error.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "flux/metrics.hpp"
#include "flux/scenario.hpp"
#include "flux/sim.hpp"

namespace fs = std::filesystem;

namespace {

int write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 1;
  }
  out << bytes;
  return out.good() ? 0 : 1;
}

std::vector<uint64_t> parse_seeds(const std::string& spec, uint64_t base_seed) {
  std::vector<uint64_t> seeds;
  if (spec.find(',') == std::string::npos) {
    // A bare count: base_seed, base_seed+1, ...
    unsigned long long n = std::stoull(spec);
    for (unsigned long long i = 0; i < n; ++i) seeds.push_back(base_seed + i);
  } else {
    std::string token;
    std::stringstream ss(spec);
    while (std::getline(ss, token, ',')) seeds.push_back(std::stoull(token));
  }
  return seeds;
}

unsigned sweep_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("FLUXLAYER_THREADS")) {
    long v = std::atol(env);
    if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 64));
  }
  return hw;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FluxLayer cross-chain liquidity simulator"};
  std::string scenario_path;
  std::string mode = "single";
  std::string seeds_spec;
  std::string out_dir = ".";
  bool quiet = false;

  app.add_option("--scenario", scenario_path, "Scenario file (json)")->required();
  app.add_option("--mode", mode, "single | paired | sweep")
      ->check(CLI::IsMember({"single", "paired", "sweep"}));
  app.add_option("--seeds", seeds_spec, "Sweep: seed count or comma-separated list");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints usage / error text
    return code == 0 ? 0 : 2;
  }

  auto loaded = flux::load_scenario(scenario_path);
  if (!loaded.ok()) {
    std::cerr << "scenario error: " << loaded.error().detail << "\n";
    return 2;
  }
  const flux::Scenario& scenario = loaded.value();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_dir << "\n";
    return 2;
  }

  try {
    if (mode == "single") {
      flux::MetricsReport report = flux::run_scenario(scenario);
      if (write_file(fs::path(out_dir) / "summary.json", flux::summary_json(report))) return 1;
      if (write_file(fs::path(out_dir) / "series.csv", flux::series_csv(report))) return 1;
      if (!quiet)
        std::cout << "mode=" << report.mode << " seed=" << report.seed
                  << " mev=" << report.mev_captured_total().to_decimal(9)
                  << " captured=" << report.opportunities_captured
                  << " finalized=" << report.settlements_finalized << "\n";
    } else if (mode == "paired") {
      flux::PairedOutcome out = flux::run_paired(scenario);
      nlohmann::ordered_json both;
      both["schema_version"] = 1;
      both["flux"] = nlohmann::ordered_json::parse(flux::summary_json(out.flux));
      both["baseline"] = nlohmann::ordered_json::parse(flux::summary_json(out.baseline));
      if (write_file(fs::path(out_dir) / "summary.json", both.dump(2) + "\n")) return 1;
      if (write_file(fs::path(out_dir) / "series.csv", flux::series_csv(out.flux))) return 1;
      if (write_file(fs::path(out_dir) / "deltas.json", flux::deltas_json(out.flux, out.baseline)))
        return 1;
      if (!quiet)
        std::cout << "flux mev=" << out.flux.mev_captured_total().to_decimal(9)
                  << " baseline mev=" << out.baseline.mev_captured_total().to_decimal(9)
                  << " latency " << out.flux.latency_mean().to_decimal(2) << " vs "
                  << out.baseline.latency_mean().to_decimal(2) << " ticks\n";
    } else {  // sweep
      if (seeds_spec.empty()) {
        std::cerr << "error: --mode sweep requires --seeds\n";
        return 2;
      }
      std::vector<uint64_t> seeds;
      try {
        seeds = parse_seeds(seeds_spec, scenario.seed);
      } catch (...) {
        std::cerr << "error: cannot parse --seeds '" << seeds_spec << "'\n";
        return 2;
      }
      if (seeds.empty()) {
        std::cerr << "error: sweep needs at least one seed\n";
        return 2;
      }

      std::vector<flux::MetricsReport> reports(seeds.size());
      std::atomic<size_t> cursor{0};
      unsigned workers = std::min<unsigned>(sweep_threads(), static_cast<unsigned>(seeds.size()));
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= seeds.size()) return;
            flux::Scenario variant = scenario;
            variant.seed = seeds[i];
            reports[i] = flux::run_scenario(variant);
          }
        });
      }
      for (std::thread& t : pool) t.join();

      // Outputs ordered by position in the seed list, never completion time.
      for (size_t i = 0; i < seeds.size(); ++i) {
        fs::path p = fs::path(out_dir) / ("summary_seed" + std::to_string(seeds[i]) + ".json");
        if (write_file(p, flux::summary_json(reports[i]))) return 1;
      }
      if (write_file(fs::path(out_dir) / "aggregate.json", flux::aggregate_json(reports))) return 1;
      if (!quiet)
        std::cout << "sweep of " << seeds.size() << " seeds done (" << workers << " workers)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
