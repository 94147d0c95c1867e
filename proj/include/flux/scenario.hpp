#pragma once

#include <map>
#include <string>
#include <vector>

#include "flux/intent.hpp"
#include "flux/ledger.hpp"
#include "flux/rational.hpp"
#include "flux/result.hpp"
#include "flux/settlement.hpp"
#include "flux/types.hpp"
#include "flux/vault.hpp"

namespace flux {

struct PriceParams {
  Rational initial;                  // human units: quote per base
  double drift_bps_per_tick = 0.0;   // log-scale
  double vol_bps_per_tick = 0.0;
  double jump_prob = 0.0;            // per tick
  double jump_size_bps = 0.0;        // log-scale spike magnitude, random sign
  Tick jump_revert_halflife_ticks = 0;  // 0: jumps are permanent
};

struct BookSpec {
  BookId id = 0;
  std::string base;
  std::string quote;
  int taker_fee_bps = 0;
  int levels = 5;
  Amount level_size = 0;     // base units per level
  int half_spread_bps = 1;
  int level_step_bps = 5;
  PriceParams price;
};

struct PoolSpec {
  PoolId id = 0;
  ChainNum chain = 0;
  ChainNum counter_chain = 0;  // where intent buy legs settle
  std::string asset_x;
  std::string asset_y;
  Amount reserve_x = 0;
  Amount reserve_y = 0;
  int fee_bps = 0;
  BookId book = 0;  // external venue quoting the same pair
};

enum class ValidatorBehavior { honest, offline, equivocate };

struct ValidatorSpec {
  ValidatorId id = 0;
  Amount restake = 0;
  ValidatorBehavior behavior = ValidatorBehavior::honest;
  Tick vote_delay_ticks = 1;
};

struct MpcSpec {
  ChainNum chain = 0;
  MpcPolicy policy;
  std::vector<std::string> online;
};

struct VaultSpec {
  bool enabled = false;
  ChainNum chain = 0;  // disbursement chain
  VaultParams params;
};

struct SearcherSpec {
  int id = 0;
  Amount min_profit_threshold = 0;  // quote units, net of all fees
  bool uses_vault = false;
  FillPolicyKind fill_policy = FillPolicyKind::fragmentable;
  int min_fragment_bps = 1000;  // of the order size
  Tick intent_deadline_ticks = 30;
  int limit_slack_bps = 15;  // headroom under the external price for matching
};

struct TakerSpec {
  int id = 0;
  int spread_bps = 10;
  Amount max_offer_amount = 0;  // base units per offer
};

struct LpSpec {
  int id = 0;
  ChainNum chain = 0;
  Amount deposit = 0;  // moved into the vault at tick 0
};

struct AccountSpec {
  std::string owner;
  ChainNum chain = 0;
  std::map<std::string, Amount> balances;
};

enum class RunMode { fluxlayer, baseline };

struct Scenario {
  int schema_version = 1;
  uint64_t seed = 0;
  Tick horizon_ticks = 0;
  RunMode mode = RunMode::fluxlayer;
  int64_t ticks_per_year = 0;   // 0: lp_apy reports the raw per-run return
  Amount settlement_fee = 0;    // vault-asset units per finalized settlement
  Tick bridge_delay_ticks = 0;  // baseline mode

  std::vector<ChainConfig> chains;
  std::vector<AssetInfo> assets;
  std::vector<AccountSpec> accounts;
  std::vector<PoolSpec> pools;
  std::vector<BookSpec> books;
  std::vector<ValidatorSpec> validators;
  QuorumRule quorum;
  std::vector<MpcSpec> mpc_policies;
  VaultSpec vault;
  std::vector<SearcherSpec> searchers;
  std::vector<TakerSpec> takers;
  std::vector<LpSpec> lps;

  static std::string searcher_owner(int id) { return "searcher:" + std::to_string(id); }
  static std::string taker_owner(int id) { return "taker:" + std::to_string(id); }
  static std::string lp_owner(int id) { return "lp:" + std::to_string(id); }
};

// Strict parse + full cross-reference validation. Unknown fields are errors;
// malformed input reports the offending field or parse position.
Result<Scenario> parse_scenario(const std::string& json_text);
Result<Scenario> load_scenario(const std::string& path);

// Canonical serialization (used by tests and the sweep runner to derive
// per-seed scenarios).
std::string scenario_to_json(const Scenario& s);

}  // namespace flux
