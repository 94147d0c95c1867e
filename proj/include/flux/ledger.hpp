#pragma once

#include <map>
#include <string>
#include <vector>

#include "flux/result.hpp"
#include "flux/types.hpp"

namespace flux {

struct ChainConfig {
  ChainNum id = 0;
  std::string name;
  int64_t block_interval_ticks = 1;   // >= 1
  int64_t native_finality_blocks = 0; // baseline-bridge finality depth
  bool no_smart_contracts = false;    // forces MPC custody for legs on this chain
  Amount gas_per_tx = 0;              // flat per-transaction fee, in gas_asset
  std::string gas_asset;
};

struct AssetInfo {
  std::string symbol;
  int decimals = 0;  // [0, 18]
};

struct Transfer {
  AccountKey from;
  AccountKey to;
  std::string asset;
  Amount amount = 0;
  Tick tick_submitted = 0;
  enum class Status { pending, applied, rejected } status = Transfer::Status::pending;
};

// Multi-chain balance book plus per-chain block clocks. Every fund-holding
// entity in the system (traders, pools, escrows, vault, fee sink) is an
// account here, so supply conservation is one walk over `balances`.
class Ledger {
 public:
  Status add_chain(ChainConfig cfg);
  Status add_asset(AssetInfo asset);

  // Genesis credit. Tracked in minted supply; the only way supply changes.
  Status mint(const AccountKey& acct, const std::string& asset, Amount amount);

  Result<Transfer> apply_transfer(const AccountKey& from, const AccountKey& to,
                                  const std::string& asset, Amount amount);

  // Clock. Heights derive from the absolute tick so split advances compose.
  Status advance_clock(Tick ticks);
  Tick now() const { return now_; }
  Result<int64_t> height(ChainNum chain) const;

  Amount balance(const AccountKey& acct, const std::string& asset) const;
  Result<__int128> total_supply(const std::string& asset) const;
  __int128 minted_supply(const std::string& asset) const;

  bool has_chain(ChainNum id) const { return chains_.count(id) > 0; }
  bool has_asset(const std::string& symbol) const { return assets_.count(symbol) > 0; }
  const ChainConfig& chain(ChainNum id) const { return chains_.at(id); }
  const AssetInfo& asset(const std::string& symbol) const { return assets_.at(symbol); }
  const std::map<ChainNum, ChainConfig>& chains() const { return chains_; }
  const std::map<std::string, AssetInfo>& assets() const { return assets_; }
  const std::map<AccountKey, std::map<std::string, Amount>>& accounts() const { return balances_; }

 private:
  std::map<ChainNum, ChainConfig> chains_;
  std::map<std::string, AssetInfo> assets_;
  std::map<AccountKey, std::map<std::string, Amount>> balances_;
  std::map<std::string, __int128> minted_;
  Tick now_ = 0;
};

}  // namespace flux
