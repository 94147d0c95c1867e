#include "flux/settlement.hpp"

#include <algorithm>
#include <cassert>

namespace flux {

Result<bool> mpc_authorize(const MpcPolicy& policy, const std::vector<std::string>& approvals) {
  std::set<std::string> unique;
  for (const std::string& s : approvals) {
    if (std::find(policy.signers.begin(), policy.signers.end(), s) == policy.signers.end())
      return Result<bool>(Err::UnknownSigner, s);
    unique.insert(s);
  }
  return Result<bool>(static_cast<int>(unique.size()) >= policy.threshold);
}

Status SettlementEngine::add_validator(Validator v) {
  if (v.restake <= 0) return Status(Err::InvalidScenario, "validator restake must be positive");
  if (validators_.count(v.id)) return Status(Err::InvalidScenario, "duplicate validator id");
  validators_.emplace(v.id, v);
  return ok_status();
}

void SettlementEngine::set_mpc_policy(ChainNum chain, MpcPolicy policy,
                                      std::vector<std::string> online_signers) {
  mpc_[chain] = {std::move(policy), std::move(online_signers)};
}

Result<SettlementId> SettlementEngine::create(SettlementRecord record, Tick now) {
  record.id = next_id_++;
  record.created_tick = now;
  record.state = SettlementState::created;
  // Custody follows the chains: a leg on a chain without contracts forces
  // the MPC backend.
  if (mpc_.count(record.sell_leg.chain) || mpc_.count(record.buy_leg.chain))
    record.custody = CustodyKind::mpc;
  SettlementId id = record.id;
  records_.emplace(id, std::move(record));
  return Result<SettlementId>(id);
}

Status SettlementEngine::lock(SettlementId id, Ledger& ledger) {
  auto it = records_.find(id);
  if (it == records_.end()) return Status(Err::UnknownRecord);
  SettlementRecord& r = it->second;
  if (r.state == SettlementState::locked) return Status(Err::AlreadyLocked);
  if (r.state != SettlementState::created) return Status(Err::AlreadyFinalized, "record is terminal");

  auto taker_leg = ledger.apply_transfer(r.buy_leg.source, settle_escrow(r.buy_leg.chain),
                                         r.buy_leg.asset, r.buy_leg.amount);
  if (!taker_leg.ok()) {
    // Taker cannot fund: the fill dies, the maker's escrow stays where it is.
    // The caller restores the intent's remaining so those units can re-match.
    r.state = SettlementState::refunded;
    return Status(Err::InsufficientTakerFunds, r.taker);
  }
  auto maker_leg = ledger.apply_transfer(r.sell_leg.source, settle_escrow(r.sell_leg.chain),
                                         r.sell_leg.asset, r.sell_leg.amount);
  assert(maker_leg.ok());  // the intent layer escrowed this up front
  (void)maker_leg;
  r.state = SettlementState::locked;
  return ok_status();
}

Status SettlementEngine::attest(SettlementId id, ValidatorId validator, bool vote) {
  auto rit = records_.find(id);
  if (rit == records_.end()) return Status(Err::UnknownRecord);
  auto vit = validators_.find(validator);
  if (vit == validators_.end()) return Status(Err::UnknownValidator);
  if (vit->second.status == Validator::Status::slashed) return Status(Err::ValidatorSlashed);
  SettlementRecord& r = rit->second;
  if (r.state != SettlementState::locked) return Status(Err::RecordNotLocked);

  auto prev = r.attestations.find(validator);
  if (prev != r.attestations.end()) {
    if (prev->second == vote) return Status(Err::AlreadyVoted);
    // Conflicting vote: equivocation evidence, slash on the spot.
    Status s = slash_equivocation(validator, rule_.slash_fraction_bps);
    assert(s.ok());
    (void)s;
    return Status(Err::AlreadyVoted, "equivocation");
  }
  r.attestations.emplace(validator, vote);
  return ok_status();
}

Amount SettlementEngine::total_active_stake() const {
  Amount sum = 0;
  for (const auto& [id, v] : validators_)
    if (v.status == Validator::Status::active) sum += v.restake;
  return sum;
}

Amount SettlementEngine::yes_stake(const SettlementRecord& record) const {
  Amount sum = 0;
  for (const auto& [vid, vote] : record.attestations) {
    if (!vote) continue;
    auto it = validators_.find(vid);
    if (it != validators_.end() && it->second.status == Validator::Status::active)
      sum += it->second.restake;
  }
  return sum;
}

bool SettlementEngine::quorum_reached(const SettlementRecord& record) const {
  Amount total = total_active_stake();
  if (total <= 0) return false;
  // yes/total >= num/den, in integers.
  return static_cast<__int128>(yes_stake(record)) * rule_.threshold_den >=
         static_cast<__int128>(total) * rule_.threshold_num;
}

bool SettlementEngine::mpc_clears(const SettlementRecord& record) const {
  for (ChainNum chain : {record.sell_leg.chain, record.buy_leg.chain}) {
    auto it = mpc_.find(chain);
    if (it == mpc_.end()) continue;
    auto ok = mpc_authorize(it->second.policy, it->second.online);
    if (!ok.ok() || !ok.value()) return false;
  }
  return true;
}

void SettlementEngine::execute_legs(SettlementRecord& record, Ledger& ledger, bool to_recipients) {
  for (SettlementLeg* leg : {&record.sell_leg, &record.buy_leg}) {
    const AccountKey& to = to_recipients ? leg->recipient : leg->refund_to;
    auto r = ledger.apply_transfer(settle_escrow(leg->chain), to, leg->asset, leg->amount);
    assert(r.ok());
    (void)r;
  }
}

Result<bool> SettlementEngine::finalize(SettlementId id, Ledger& ledger, Tick now) {
  auto it = records_.find(id);
  if (it == records_.end()) return Result<bool>(Err::UnknownRecord);
  SettlementRecord& r = it->second;
  if (r.state == SettlementState::finalized) return Result<bool>(true);
  if (r.state != SettlementState::locked) return Result<bool>(Err::RecordNotLocked);
  if (!quorum_reached(r)) return Result<bool>(false);
  if (r.custody == CustodyKind::mpc && !mpc_clears(r)) return Result<bool>(false);
  execute_legs(r, ledger, true);
  r.state = SettlementState::finalized;
  r.finalized_tick = now;
  return Result<bool>(true);
}

Status SettlementEngine::refund_on_timeout(SettlementId id, Ledger& ledger, Tick now) {
  auto it = records_.find(id);
  if (it == records_.end()) return Status(Err::UnknownRecord);
  SettlementRecord& r = it->second;
  if (r.state == SettlementState::finalized) return Status(Err::AlreadyFinalized);
  if (r.state != SettlementState::locked) return Status(Err::RecordNotLocked);
  if (now - r.created_tick < rule_.timeout_ticks) return Status(Err::NotTimedOut);
  if (r.custody == CustodyKind::mpc && !mpc_clears(r))
    return Status(Err::NotTimedOut, "mpc refund approvals unavailable");
  execute_legs(r, ledger, false);
  r.state = SettlementState::refunded;
  return ok_status();
}

Status SettlementEngine::slash_equivocation(ValidatorId validator, int fraction_bps) {
  auto it = validators_.find(validator);
  if (it == validators_.end()) return Status(Err::UnknownValidator);
  Validator& v = it->second;
  Amount cut = static_cast<Amount>(static_cast<__int128>(v.restake) * fraction_bps / 10000);
  v.restake -= cut;
  v.status = Validator::Status::slashed;
  return ok_status();
}

Result<bool> SettlementEngine::baseline_bridge_settle(SettlementId id, Ledger& ledger, Tick now,
                                                      Tick bridge_delay_ticks) {
  auto it = records_.find(id);
  if (it == records_.end()) return Result<bool>(Err::UnknownRecord);
  SettlementRecord& r = it->second;
  if (r.state == SettlementState::finalized) return Result<bool>(true);
  if (r.state != SettlementState::locked) return Result<bool>(Err::RecordNotLocked);
  const ChainConfig& source = ledger.chain(r.sell_leg.chain);
  Tick maturity = r.created_tick + source.native_finality_blocks * source.block_interval_ticks +
                  bridge_delay_ticks;
  if (now < maturity) return Result<bool>(false);
  execute_legs(r, ledger, true);
  r.state = SettlementState::finalized;
  r.finalized_tick = now;
  return Result<bool>(true);
}

const SettlementRecord* SettlementEngine::find(SettlementId id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

}  // namespace flux
