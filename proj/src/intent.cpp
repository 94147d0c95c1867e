#include "flux/intent.hpp"

#include <algorithm>
#include <cassert>

namespace flux {

Amount feasible_take(Amount remaining, Amount offer_room, const FillPolicy& policy) {
  Amount room = std::min(remaining, offer_room);
  if (room <= 0) return 0;
  if (policy.kind == FillPolicyKind::all_or_nothing) return room;  // coverage checked by caller
  const Amount mf = policy.min_fragment;
  if (room == remaining) return remaining;  // closes the intent
  Amount partial = std::min(offer_room, remaining - mf);
  return partial >= mf ? partial : 0;
}

AccountKey IntentBook::refund_target(const Intent& intent) const {
  if (intent.funding.kind == FundingKind::vault_loan)
    return funding_account(intent.maker, intent.sell_leg.chain);
  return {intent.maker, intent.sell_leg.chain};
}

Result<IntentId> IntentBook::submit_intent(Intent intent, Ledger& ledger) {
  if (intent.sell_leg.amount <= 0) return Result<IntentId>(Err::ZeroAmount, "sell amount");
  if (intent.deadline_tick <= ledger.now()) return Result<IntentId>(Err::DeadlineInPast);
  if (intent.limit_price.sign() <= 0)
    return Result<IntentId>(Err::InvalidScenario, "limit price must be positive");
  if (intent.fill_policy.kind == FillPolicyKind::fragmentable &&
      (intent.fill_policy.min_fragment <= 0 ||
       intent.fill_policy.min_fragment > intent.sell_leg.amount))
    return Result<IntentId>(Err::InvalidScenario, "min_fragment out of range");

  AccountKey source = intent.funding.kind == FundingKind::vault_loan
                          ? funding_account(intent.maker, intent.sell_leg.chain)
                          : AccountKey{intent.maker, intent.sell_leg.chain};
  auto escrowed = ledger.apply_transfer(source, escrow_account(intent.sell_leg.chain),
                                        intent.sell_leg.asset, intent.sell_leg.amount);
  if (!escrowed.ok()) {
    if (escrowed.code() == Err::InsufficientBalance || escrowed.code() == Err::UnknownAccount)
      return Result<IntentId>(Err::InsufficientFunds, intent.maker);
    return Result<IntentId>(escrowed.error());
  }

  intent.id = next_id_++;
  intent.created_tick = ledger.now();
  intent.state = IntentState::open;
  intent.remaining = intent.sell_leg.amount;
  intent.buy_leg.amount = (intent.limit_price * Rational(intent.sell_leg.amount)).ceil().to_i64().value_or(kMaxAmount);
  IntentId id = intent.id;
  intents_.emplace(id, std::move(intent));
  return Result<IntentId>(id);
}

Status IntentBook::submit_offer(FillOffer offer, Tick now) {
  auto it = intents_.find(offer.intent_id);
  if (it == intents_.end()) return Status(Err::UnknownIntent);
  Intent& intent = it->second;
  if (intent.state != IntentState::open && intent.state != IntentState::partially_filled)
    return Status(Err::IntentClosed);
  if (now >= intent.deadline_tick) return Status(Err::IntentClosed, "past deadline");
  if (offer.take_amount <= 0) return Status(Err::ZeroAmount);
  if (offer.price < intent.limit_price) return Status(Err::PriceBelowLimit);
  if (intent.fill_policy.kind == FillPolicyKind::fragmentable &&
      offer.take_amount < intent.fill_policy.min_fragment)
    return Status(Err::FragmentTooSmall);
  offer.offered_tick = now;
  offer.seq = next_seq_++;
  offers_.push_back(std::move(offer));
  return ok_status();
}

std::vector<MatchResult> IntentBook::match_tick(Tick now) {
  std::vector<MatchResult> results;

  // Group offers per intent, then order each group by (price desc, time asc,
  // arrival asc). Intents are visited in id order for determinism.
  std::map<IntentId, std::vector<FillOffer>> grouped;
  for (FillOffer& o : offers_) grouped[o.intent_id].push_back(std::move(o));
  offers_.clear();

  for (auto& [intent_id, queue] : grouped) {
    auto it = intents_.find(intent_id);
    if (it == intents_.end()) continue;
    Intent& intent = it->second;
    if (intent.state != IntentState::open && intent.state != IntentState::partially_filled) continue;
    if (now >= intent.deadline_tick) continue;  // expiry sweep will refund

    std::sort(queue.begin(), queue.end(), [](const FillOffer& a, const FillOffer& b) {
      if (a.price != b.price) return b.price < a.price;
      if (a.offered_tick != b.offered_tick) return a.offered_tick < b.offered_tick;
      return a.seq < b.seq;
    });

    if (intent.fill_policy.kind == FillPolicyKind::all_or_nothing) {
      __int128 cover = 0;
      for (const FillOffer& o : queue) cover += o.take_amount;
      if (cover < intent.remaining) continue;  // stays open this batch
    }

    MatchResult result;
    result.intent_id = intent_id;
    for (const FillOffer& offer : queue) {
      if (intent.remaining == 0) break;
      Amount take = feasible_take(intent.remaining, offer.take_amount, intent.fill_policy);
      if (take <= 0) continue;
      Amount buy_amount = (offer.price * Rational(take)).ceil().to_i64().value_or(kMaxAmount);
      result.fills.push_back({offer.taker, take, offer.price, buy_amount});
      intent.remaining -= take;
    }
    if (result.fills.empty()) continue;

    if (intent.remaining == 0) {
      intent.state = IntentState::filled;
      result.fully_filled = true;
    } else {
      intent.state = IntentState::partially_filled;
    }
    assert(intent.fill_policy.kind != FillPolicyKind::all_or_nothing || result.fully_filled);
    results.push_back(std::move(result));
  }
  return results;
}

std::vector<IntentBook::Refund> IntentBook::expire_and_cancel(Ledger& ledger, Tick now) {
  std::vector<Refund> refunds;
  for (auto& [id, intent] : intents_) {
    if (intent.state != IntentState::open && intent.state != IntentState::partially_filled) continue;
    if (now < intent.deadline_tick) continue;
    intent.state = IntentState::expired;
    if (intent.remaining > 0) {
      AccountKey to = refund_target(intent);
      auto r = ledger.apply_transfer(escrow_account(intent.sell_leg.chain), to,
                                     intent.sell_leg.asset, intent.remaining);
      assert(r.ok());
      (void)r;
      refunds.push_back({id, intent.remaining, to});
      intent.remaining = 0;
    }
  }
  return refunds;
}

Result<IntentBook::Refund> IntentBook::cancel(IntentId id, Ledger& ledger, Tick now) {
  (void)now;
  auto it = intents_.find(id);
  if (it == intents_.end()) return Result<Refund>(Err::UnknownIntent);
  Intent& intent = it->second;
  if (intent.state != IntentState::open && intent.state != IntentState::partially_filled)
    return Result<Refund>(Err::IntentClosed);
  intent.state = IntentState::cancelled;
  Refund refund{id, intent.remaining, refund_target(intent)};
  if (intent.remaining > 0) {
    auto r = ledger.apply_transfer(escrow_account(intent.sell_leg.chain), refund.to,
                                   intent.sell_leg.asset, intent.remaining);
    assert(r.ok());
    (void)r;
    intent.remaining = 0;
  }
  return Result<Refund>(refund);
}

Status IntentBook::restore(IntentId id, Amount amount) {
  auto it = intents_.find(id);
  if (it == intents_.end()) return Status(Err::UnknownIntent);
  Intent& intent = it->second;
  if (amount <= 0) return Status(Err::ZeroAmount);
  intent.remaining += amount;
  if (intent.state == IntentState::filled || intent.state == IntentState::partially_filled)
    intent.state = intent.remaining == intent.sell_leg.amount ? IntentState::open
                                                              : IntentState::partially_filled;
  return ok_status();
}

const Intent* IntentBook::find(IntentId id) const {
  auto it = intents_.find(id);
  return it == intents_.end() ? nullptr : &it->second;
}

std::map<std::pair<ChainNum, std::string>, Amount> IntentBook::open_escrow_by_asset() const {
  std::map<std::pair<ChainNum, std::string>, Amount> out;
  for (const auto& [id, intent] : intents_) {
    if (intent.state == IntentState::open || intent.state == IntentState::partially_filled)
      out[{intent.sell_leg.chain, intent.sell_leg.asset}] += intent.remaining;
  }
  return out;
}

}  // namespace flux
