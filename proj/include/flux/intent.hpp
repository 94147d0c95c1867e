#pragma once

#include <map>
#include <string>
#include <vector>

#include "flux/ledger.hpp"
#include "flux/rational.hpp"
#include "flux/result.hpp"
#include "flux/types.hpp"

namespace flux {

enum class FillPolicyKind { all_or_nothing, fragmentable };

struct FillPolicy {
  FillPolicyKind kind = FillPolicyKind::all_or_nothing;
  Amount min_fragment = 0;  // fragmentable only, > 0
};

enum class IntentState { open, partially_filled, filled, cancelled, expired };

enum class FundingKind { own_funds, vault_loan };

struct Funding {
  FundingKind kind = FundingKind::own_funds;
  PositionId position = -1;
};

struct IntentLeg {
  ChainNum chain = 0;
  std::string asset;
  Amount amount = 0;  // sell leg: total sell size; buy leg: min total out
};

// A funded cross-chain swap order. The sell leg is escrowed in full at
// submission; intents are never promissory.
struct Intent {
  IntentId id = -1;
  std::string maker;
  IntentLeg sell_leg;
  IntentLeg buy_leg;
  Rational limit_price;  // min buy units per sell unit
  FillPolicy fill_policy;
  Tick deadline_tick = 0;
  Funding funding;
  Tick created_tick = 0;
  IntentState state = IntentState::open;
  Amount remaining = 0;
};

struct FillOffer {
  std::string taker;
  IntentId intent_id = -1;
  Amount take_amount = 0;  // max sell-leg units the taker will absorb
  Rational price;          // buy units per sell unit
  Tick offered_tick = 0;
  uint64_t seq = 0;        // arrival order, assigned by the book
};

struct Fill {
  std::string taker;
  Amount amount = 0;   // sell-leg units
  Rational price;
  Amount buy_amount = 0;  // ceil(amount * price), what the taker pays
};

struct MatchResult {
  IntentId intent_id = -1;
  std::vector<Fill> fills;
  bool fully_filled = false;
  std::vector<SettlementId> settlements;  // populated by the settlement layer
};

// Batch-matched marketplace under price-time priority. Offers live for one
// matching batch; takers re-quote every tick.
class IntentBook {
 public:
  static AccountKey escrow_account(ChainNum chain) { return {"escrow:intent", chain}; }
  static AccountKey funding_account(const std::string& maker, ChainNum chain) {
    return {"funding:" + maker, chain};
  }

  // Escrows the sell leg (from the maker's own account, or the maker's
  // protocol funding account for vault-financed intents) and opens the
  // intent. buy_leg.amount is derived from the limit price.
  Result<IntentId> submit_intent(Intent intent, Ledger& ledger);

  Status submit_offer(FillOffer offer, Tick now);

  // Price-time priority batch match. AllOrNothing intents fill only when the
  // batch covers them entirely; fragmentable intents fill greedily keeping
  // remaining >= min_fragment or exactly zero. Unused offers are dropped.
  std::vector<MatchResult> match_tick(Tick now);

  struct Refund {
    IntentId intent_id = -1;
    Amount amount = 0;
    AccountKey to;
  };
  // Expires overdue intents and refunds unmatched escrow.
  std::vector<Refund> expire_and_cancel(Ledger& ledger, Tick now);
  Result<Refund> cancel(IntentId id, Ledger& ledger, Tick now);

  // Returns matched-but-unlocked units to the intent after a failed
  // settlement lock; the escrow never moved.
  Status restore(IntentId id, Amount amount);

  const Intent* find(IntentId id) const;
  const std::map<IntentId, Intent>& intents() const { return intents_; }
  const std::vector<FillOffer>& queued_offers() const { return offers_; }

  // Sum of remaining escrow per (chain, asset); equals the escrow account
  // balances whenever no lock is in flight.
  std::map<std::pair<ChainNum, std::string>, Amount> open_escrow_by_asset() const;

 private:
  std::map<IntentId, Intent> intents_;
  std::vector<FillOffer> offers_;
  IntentId next_id_ = 0;
  uint64_t next_seq_ = 0;

  AccountKey refund_target(const Intent& intent) const;
};

// Greedy take for one offer under the fragment rules: the largest t with
// t <= offer_room, t == remaining or min_frag <= t <= remaining - min_frag.
Amount feasible_take(Amount remaining, Amount offer_room, const FillPolicy& policy);

}  // namespace flux
