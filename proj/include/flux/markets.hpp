#pragma once

#include <string>
#include <vector>

#include "flux/ledger.hpp"
#include "flux/rational.hpp"
#include "flux/result.hpp"
#include "flux/types.hpp"

namespace flux {

// floor(sqrt(n)), n >= 0.
BigInt isqrt(const BigInt& n);

// Constant-product pool. Reserves live in the pool's ledger account so supply
// conservation and swap accounting share one source of truth.
struct AmmPool {
  PoolId id = 0;
  ChainNum chain = 0;
  std::string asset_x;  // base, e.g. BTC
  std::string asset_y;  // quote, e.g. USDT
  int fee_bps = 0;      // [0,1000], charged on input
  ChainNum counter_chain = 0;  // where intent buy legs settle

  AccountKey account() const { return {"pool:" + std::to_string(id), chain}; }
};

struct Quote {
  Amount amount_in = 0;
  Amount amount_out = 0;
  Rational spot_before;  // output units per input unit before the trade
  Rational spot_after;
  int64_t slippage_bps = 0;  // >= 0
  Amount fee_paid = 0;       // AMM: input units; CEX: quote units
  bool partial = false;      // CEX only: ladder exhausted before the request
};

// Pure constant-product quote on explicit reserves, fee on input,
// output floored.
Result<Quote> amm_quote(Amount reserve_in, Amount reserve_out, int fee_bps, Amount amount_in);

Result<Quote> amm_quote_exact_in(const AmmPool& pool, const Ledger& ledger,
                                 const std::string& asset_in, Amount amount_in);

// Executes against the ledger: trader pays amount_in, receives the quoted
// output. Post-swap k never decreases.
Result<Quote> amm_swap(const AmmPool& pool, Ledger& ledger, const AccountKey& trader,
                       const std::string& asset_in, Amount amount_in);

// Pool spot price in quote units per base unit.
Rational amm_spot(const AmmPool& pool, const Ledger& ledger);

// Depth-laddered external venue. Ladders are refreshed from the scenario's
// price process each tick; fills consume depth within a tick.
struct CexLevel {
  Rational price;  // quote base-units per base base-unit
  Amount size = 0; // base units
};

struct CexBook {
  BookId id = 0;
  std::string base;
  std::string quote;
  int taker_fee_bps = 0;
  std::vector<CexLevel> bids;  // price strictly descending
  std::vector<CexLevel> asks;  // price strictly ascending
};

enum class Side { buy, sell };

Status validate_book(const CexBook& book);
Rational cex_mid(const CexBook& book);

// Walks the ladder best-first for `base_amount` of base. Sell: output is
// quote net of taker fee. Buy: amount_in is the quote cost including fee.
// Exhausted ladders return the partial fill flagged, never silently truncated.
Result<Quote> cex_quote(const CexBook& book, Side side, Amount base_amount);
Result<Quote> cex_fill(CexBook& book, Side side, Amount base_amount);

enum class ArbDirection { none, buy_base, sell_base };

struct ArbPlan {
  ArbDirection direction = ArbDirection::none;
  Amount amount_in = 0;        // buy_base: quote units; sell_base: base units
  Amount expected_out = 0;
  Rational expected_profit;    // quote units, net of pool fee, gross of external fees
};

// Profit-maximizing single trade against the pool given a flat external
// price (quote per base). Zero size when nothing clears the pool fee.
ArbPlan optimal_arb_size(const AmmPool& pool, const Ledger& ledger, const Rational& external_price);
ArbPlan optimal_arb_size_core(Amount reserve_x, Amount reserve_y, int fee_bps,
                              const Rational& external_price);

}  // namespace flux
