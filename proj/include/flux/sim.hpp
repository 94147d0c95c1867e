#pragma once

#include <map>
#include <set>
#include <vector>

#include "flux/intent.hpp"
#include "flux/ledger.hpp"
#include "flux/markets.hpp"
#include "flux/metrics.hpp"
#include "flux/pricing.hpp"
#include "flux/scenario.hpp"
#include "flux/settlement.hpp"
#include "flux/vault.hpp"

namespace flux {

struct Detection {
  PoolId pool = 0;
  ArbDirection direction = ArbDirection::none;
  Amount amount_in = 0;
  Amount expected_out = 0;
  Rational gross_profit;  // net of pool fee
  Rational net_profit;    // minus external venue fee, gas and settlement fee
};

// One scenario instance stepped tick by tick. Strictly single-threaded and
// deterministic: iteration orders are fixed and the only randomness is the
// per-book price stream.
class World {
 public:
  explicit World(const Scenario& scenario);

  // One full tick: prices, searchers, takers, match, settle, vault, expiry,
  // metrics, then the clock advance.
  void step();
  MetricsReport run();

  std::vector<Detection> detect_opportunities() const;

  const Ledger& ledger() const { return ledger_; }
  const Vault& vault() const { return vault_; }
  const IntentBook& intents() const { return book_; }
  const SettlementEngine& settlements() const { return engine_; }
  const CexBook& cex_book(BookId id) const { return books_[book_index_.at(id)]; }
  const AmmPool& amm_pool(PoolId id) const { return pools_[pool_index_.at(id)]; }
  const MetricsReport& metrics() const { return metrics_; }
  Tick now() const { return ledger_.now(); }

 private:
  struct Flow {
    int searcher = -1;
    size_t pool_idx = 0;
    ArbDirection dir = ArbDirection::none;
    IntentId intent = -1;
    PositionId loan = -1;
    Rational quote_spent;     // cash out: venue cost, escrow, gas, fees
    Rational quote_received;  // cash in: fills, dump proceeds, refunds
    int open_settlements = 0;
    bool captured = false;
    bool closed = false;
  };

  Scenario scn_;
  Ledger ledger_;
  std::vector<AmmPool> pools_;
  std::map<PoolId, size_t> pool_index_;
  std::vector<CexBook> books_;
  std::map<BookId, size_t> book_index_;
  std::vector<PriceProcess> processes_;
  IntentBook book_;
  SettlementEngine engine_;
  Vault vault_;
  MetricsReport metrics_;

  std::vector<Flow> flows_;
  std::map<IntentId, size_t> flow_by_intent_;
  std::map<SettlementId, size_t> flow_by_settlement_;
  std::set<IntentId> intents_with_fills_;
  std::map<int, int> active_flows_;  // searcher id -> open flow count

  void phase_prices();
  void phase_searchers();
  void phase_takers();
  void phase_match();
  void phase_settle();
  void phase_vault();
  void phase_expiry();
  void phase_metrics();

  void rebuild_book(size_t idx);
  Rational unit_scale(const std::string& base, const std::string& quote) const;

  void execute_flow(int searcher_id, const SearcherSpec& spec, const Detection& d);
  void charge_gas(const AccountKey& payer, ChainNum chain, Flow* flow);
  void dump_base(Flow& flow, const AccountKey& holder, Amount base_amount);
  void on_finalized(SettlementId id);
  void on_refunded(SettlementId id);
  void settle_fee(Flow& flow, const AccountKey& from, ChainNum chain);
  void check_conservation();

  AccountKey searcher_free(int id, ChainNum chain) const {
    return {Scenario::searcher_owner(id), chain};
  }
};

MetricsReport run_scenario(const Scenario& scenario);

struct PairedOutcome {
  MetricsReport flux;
  MetricsReport baseline;
};
// Both modes on the identical seed and price path.
PairedOutcome run_paired(Scenario scenario);

}  // namespace flux
