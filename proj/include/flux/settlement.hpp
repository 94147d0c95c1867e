#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "flux/ledger.hpp"
#include "flux/rational.hpp"
#include "flux/result.hpp"
#include "flux/types.hpp"

namespace flux {

struct Validator {
  ValidatorId id = 0;
  Amount restake = 0;  // stake units
  enum class Status { active, slashed } status = Validator::Status::active;
};

struct QuorumRule {
  int64_t threshold_num = 2;
  int64_t threshold_den = 3;  // 1/2 < num/den <= 1
  Tick timeout_ticks = 100;
  int slash_fraction_bps = 10000;
};

struct MpcPolicy {
  std::vector<std::string> signers;
  int threshold = 1;  // 1 <= t <= n
};

// Counting t-of-n authorization. Duplicates count once; unknown signers are
// an error, not a silent skip.
Result<bool> mpc_authorize(const MpcPolicy& policy, const std::vector<std::string>& approvals);

enum class CustodyKind { escrow, mpc };

struct SettlementLeg {
  ChainNum chain = 0;
  std::string asset;
  Amount amount = 0;
  AccountKey source;     // debited at lock
  AccountKey recipient;  // credited at finalize
  AccountKey refund_to;  // credited at refund
};

enum class SettlementState { created, locked, finalized, refunded };

// One matched fill moving through custody: locked -> attested -> terminal.
// The two legs execute atomically from the ledger's perspective despite the
// non-atomic chains underneath.
struct SettlementRecord {
  SettlementId id = -1;
  IntentId intent_id = -1;
  std::string maker;
  std::string taker;
  SettlementLeg sell_leg;  // maker -> taker, sourced from intent escrow
  SettlementLeg buy_leg;   // taker -> maker
  CustodyKind custody = CustodyKind::escrow;
  std::map<ValidatorId, bool> attestations;
  Tick created_tick = 0;
  SettlementState state = SettlementState::created;
  Tick finalized_tick = -1;

  Tick latency() const { return finalized_tick - created_tick; }
};

// Stake-weighted attestation quorum over settlement records, plus the
// slow-bridge comparator. Single-threaded; owned by the simulation loop.
class SettlementEngine {
 public:
  SettlementEngine() = default;
  explicit SettlementEngine(QuorumRule rule) : rule_(rule) {}

  Status add_validator(Validator v);
  void set_mpc_policy(ChainNum chain, MpcPolicy policy, std::vector<std::string> online_signers);

  Result<SettlementId> create(SettlementRecord record, Tick now);

  // Pulls both legs into settlement escrow, taker side first. If the taker
  // cannot fund, the maker leg refunds immediately and the record dies.
  Status lock(SettlementId id, Ledger& ledger);

  // Records one vote per validator. A conflicting second vote is
  // equivocation: the validator is slashed and the vote ignored.
  Status attest(SettlementId id, ValidatorId validator, bool vote);

  // Finalizes when yes-stake / active-stake >= threshold (and the MPC policy
  // authorizes, for MPC custody). Pending is a normal outcome.
  Result<bool> finalize(SettlementId id, Ledger& ledger, Tick now);

  Status refund_on_timeout(SettlementId id, Ledger& ledger, Tick now);

  Status slash_equivocation(ValidatorId validator, int fraction_bps);

  // Comparator: finalizes unconditionally once the source chain's native
  // finality depth plus the bridge delay has elapsed. No quorum involved.
  Result<bool> baseline_bridge_settle(SettlementId id, Ledger& ledger, Tick now,
                                      Tick bridge_delay_ticks);

  static AccountKey settle_escrow(ChainNum chain) { return {"escrow:settle", chain}; }

  Amount total_active_stake() const;
  Amount yes_stake(const SettlementRecord& record) const;
  bool quorum_reached(const SettlementRecord& record) const;

  const SettlementRecord* find(SettlementId id) const;
  const std::map<SettlementId, SettlementRecord>& records() const { return records_; }
  const std::map<ValidatorId, Validator>& validators() const { return validators_; }
  const QuorumRule& rule() const { return rule_; }

 private:
  QuorumRule rule_;
  std::map<ValidatorId, Validator> validators_;
  std::map<SettlementId, SettlementRecord> records_;
  struct ChainMpc {
    MpcPolicy policy;
    std::vector<std::string> online;
  };
  std::map<ChainNum, ChainMpc> mpc_;
  SettlementId next_id_ = 0;

  bool mpc_clears(const SettlementRecord& record) const;
  void execute_legs(SettlementRecord& record, Ledger& ledger, bool to_recipients);
};

}  // namespace flux
