#pragma once

#include <string>
#include <vector>

#include "flux/rational.hpp"
#include "flux/types.hpp"

namespace flux {

struct SeriesRow {
  Tick tick = 0;
  Rational mev_cum;
  int64_t settlements_finalized = 0;
  Rational mean_latency;
  Rational utilization;
  Rational share_price;
  Rational slippage_mean_bps;
};

// Per-run measurement bundle. Monetary fields are exact rationals in quote
// units; presentation rounds to 9 decimals, half to even.
struct MetricsReport {
  uint64_t seed = 0;
  std::string mode;
  Tick horizon_ticks = 0;

  int64_t opportunities_detected = 0;
  int64_t opportunities_captured = 0;

  int64_t intents_submitted = 0;
  int64_t intents_filled = 0;  // fully filled
  Rational submitted_notional;  // quote-valued at submission marks
  Rational matched_notional;
  int64_t fills_total = 0;
  int64_t intents_with_fills = 0;

  int64_t settlements_created = 0;
  int64_t settlements_finalized = 0;
  int64_t settlements_refunded = 0;
  std::vector<Tick> latencies;

  Rational searcher_pnl_total;
  Rational taker_pnl_total;

  Rational gas_fees;
  Rational settlement_fees;
  Rational amm_fees;
  Rational cex_fees;

  Rational slippage_sum_bps;
  int64_t slippage_samples = 0;

  Rational share_price_final = Rational(1);
  Rational lp_apy;
  Rational utilization_final;
  Rational interest_paid;
  int64_t loans_opened = 0;
  int64_t loans_repaid = 0;
  int64_t loans_liquidated = 0;
  Rational maker_capital_committed;

  bool conservation_ok = true;
  std::vector<SeriesRow> series;

  Rational mev_captured_total() const { return searcher_pnl_total + taker_pnl_total; }
  Rational total_fees() const { return gas_fees + settlement_fees + amm_fees + cex_fees; }
  Rational fill_rate() const;
  Rational mean_fragments_per_filled_intent() const;
  Rational latency_mean() const;
  Rational latency_median() const;
  Rational latency_p95() const;  // nearest-rank
  Rational slippage_mean_bps() const;
  Rational maker_roi() const;
};

// Stable-ordered JSON with fixed 9-decimal formatting.
std::string summary_json(const MetricsReport& r);

// Per-tick table: tick,mev_cum,settlements_finalized,mean_latency,
// utilization,share_price,slippage_mean_bps
std::string series_csv(const MetricsReport& r);

std::string deltas_json(const MetricsReport& flux, const MetricsReport& baseline);

// Mean and population standard deviation per headline metric across a sweep.
std::string aggregate_json(const std::vector<MetricsReport>& runs);

}  // namespace flux
