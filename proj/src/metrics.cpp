#include "flux/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace flux {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string dec(const Rational& r) { return r.to_decimal(9); }

Rational mean_of(const std::vector<Rational>& xs) {
  if (xs.empty()) return Rational();
  Rational sum;
  for (const Rational& x : xs) sum += x;
  return sum / Rational(static_cast<int64_t>(xs.size()));
}

std::string stddev_of(const std::vector<Rational>& xs) {
  if (xs.empty()) return Rational().to_decimal(9);
  Rational mu = mean_of(xs);
  Rational var;
  for (const Rational& x : xs) {
    Rational d = x - mu;
    var += d * d;
  }
  var = var / Rational(static_cast<int64_t>(xs.size()));
  double sd = std::sqrt(var.to_double());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", sd);
  return buf;
}

}  // namespace

Rational MetricsReport::fill_rate() const {
  if (submitted_notional.is_zero()) return Rational();
  return matched_notional / submitted_notional;
}

Rational MetricsReport::mean_fragments_per_filled_intent() const {
  if (intents_with_fills == 0) return Rational();
  return Rational(fills_total) / Rational(intents_with_fills);
}

Rational MetricsReport::latency_mean() const {
  if (latencies.empty()) return Rational();
  int64_t sum = 0;
  for (Tick t : latencies) sum += t;
  return Rational(sum) / Rational(static_cast<int64_t>(latencies.size()));
}

Rational MetricsReport::latency_median() const {
  if (latencies.empty()) return Rational();
  std::vector<Tick> s = latencies;
  std::sort(s.begin(), s.end());
  size_t n = s.size();
  if (n % 2 == 1) return Rational(s[n / 2]);
  return (Rational(s[n / 2 - 1]) + Rational(s[n / 2])) / Rational(2);
}

Rational MetricsReport::latency_p95() const {
  if (latencies.empty()) return Rational();
  std::vector<Tick> s = latencies;
  std::sort(s.begin(), s.end());
  size_t n = s.size();
  size_t rank = (95 * n + 99) / 100;  // ceil(0.95 n), nearest-rank
  if (rank == 0) rank = 1;
  return Rational(s[rank - 1]);
}

Rational MetricsReport::slippage_mean_bps() const {
  if (slippage_samples == 0) return Rational();
  return slippage_sum_bps / Rational(slippage_samples);
}

Rational MetricsReport::maker_roi() const {
  if (maker_capital_committed.is_zero()) return Rational();
  return searcher_pnl_total / maker_capital_committed;
}

std::string summary_json(const MetricsReport& r) {
  ordered_json j;
  j["schema_version"] = 1;
  j["seed"] = r.seed;
  j["mode"] = r.mode;
  j["horizon_ticks"] = r.horizon_ticks;
  j["opportunities"] = {{"detected", r.opportunities_detected}, {"captured", r.opportunities_captured}};
  j["intents"] = {{"submitted", r.intents_submitted},
                  {"filled", r.intents_filled},
                  {"fill_rate", dec(r.fill_rate())},
                  {"mean_fragments_per_filled", dec(r.mean_fragments_per_filled_intent())}};
  j["settlements"] = {{"created", r.settlements_created},
                      {"finalized", r.settlements_finalized},
                      {"refunded", r.settlements_refunded},
                      {"latency_mean_ticks", dec(r.latency_mean())},
                      {"latency_median_ticks", dec(r.latency_median())},
                      {"latency_p95_ticks", dec(r.latency_p95())}};
  j["mev"] = {{"captured_total", dec(r.mev_captured_total())},
              {"searcher_pnl", dec(r.searcher_pnl_total)},
              {"taker_pnl", dec(r.taker_pnl_total)}};
  j["fees"] = {{"total", dec(r.total_fees())},
               {"gas", dec(r.gas_fees)},
               {"settlement", dec(r.settlement_fees)},
               {"amm", dec(r.amm_fees)},
               {"cex", dec(r.cex_fees)}};
  j["slippage_mean_bps"] = dec(r.slippage_mean_bps());
  j["vault"] = {{"share_price_final", dec(r.share_price_final)},
                {"lp_apy", dec(r.lp_apy)},
                {"utilization_final", dec(r.utilization_final)},
                {"interest_paid", dec(r.interest_paid)},
                {"loans",
                 {{"opened", r.loans_opened}, {"repaid", r.loans_repaid}, {"liquidated", r.loans_liquidated}}},
                {"maker_roi", dec(r.maker_roi())}};
  j["conservation_ok"] = r.conservation_ok;
  return j.dump(2) + "\n";
}

std::string series_csv(const MetricsReport& r) {
  std::string out = "tick,mev_cum,settlements_finalized,mean_latency,utilization,share_price,slippage_mean_bps\n";
  for (const SeriesRow& row : r.series) {
    out += std::to_string(row.tick);
    out += ',';
    out += dec(row.mev_cum);
    out += ',';
    out += std::to_string(row.settlements_finalized);
    out += ',';
    out += dec(row.mean_latency);
    out += ',';
    out += dec(row.utilization);
    out += ',';
    out += dec(row.share_price);
    out += ',';
    out += dec(row.slippage_mean_bps);
    out += '\n';
  }
  return out;
}

std::string deltas_json(const MetricsReport& flux, const MetricsReport& baseline) {
  Rational flux_lat = flux.latency_mean();
  Rational base_lat = baseline.latency_mean();
  Rational reduction;
  if (base_lat.sign() > 0)
    reduction = (Rational(1) - flux_lat / base_lat) * Rational(100);

  ordered_json j;
  j["schema_version"] = 1;
  j["seed"] = flux.seed;
  j["latency"] = {{"flux_mean_ticks", dec(flux_lat)},
                  {"baseline_mean_ticks", dec(base_lat)},
                  {"reduction_pct", dec(reduction)}};
  j["mev"] = {{"flux", dec(flux.mev_captured_total())},
              {"baseline", dec(baseline.mev_captured_total())},
              {"delta", dec(flux.mev_captured_total() - baseline.mev_captured_total())}};
  j["captures"] = {{"flux", flux.opportunities_captured},
                   {"baseline", baseline.opportunities_captured},
                   {"delta", flux.opportunities_captured - baseline.opportunities_captured}};
  j["fees"] = {{"flux", dec(flux.total_fees())},
               {"baseline", dec(baseline.total_fees())},
               {"delta", dec(flux.total_fees() - baseline.total_fees())}};
  return j.dump(2) + "\n";
}

std::string aggregate_json(const std::vector<MetricsReport>& runs) {
  auto collect = [&](auto&& get) {
    std::vector<Rational> xs;
    xs.reserve(runs.size());
    for (const MetricsReport& r : runs) xs.push_back(get(r));
    return xs;
  };
  auto entry = [&](auto&& get) {
    auto xs = collect(get);
    return ordered_json{{"mean", dec(mean_of(xs))}, {"stddev", stddev_of(xs)}};
  };

  ordered_json j;
  j["schema_version"] = 1;
  j["runs"] = runs.size();
  ordered_json seeds = ordered_json::array();
  for (const MetricsReport& r : runs) seeds.push_back(r.seed);
  j["seeds"] = seeds;
  j["mev_captured_total"] = entry([](const MetricsReport& r) { return r.mev_captured_total(); });
  j["opportunities_captured"] =
      entry([](const MetricsReport& r) { return Rational(r.opportunities_captured); });
  j["latency_mean_ticks"] = entry([](const MetricsReport& r) { return r.latency_mean(); });
  j["fill_rate"] = entry([](const MetricsReport& r) { return r.fill_rate(); });
  j["total_fees"] = entry([](const MetricsReport& r) { return r.total_fees(); });
  j["share_price_final"] = entry([](const MetricsReport& r) { return r.share_price_final; });
  return j.dump(2) + "\n";
}

}  // namespace flux
