#include "flux/ledger.hpp"

namespace flux {

std::string_view err_name(Err e) {
  switch (e) {
    case Err::InsufficientBalance: return "InsufficientBalance";
    case Err::UnknownAccount: return "UnknownAccount";
    case Err::UnknownAsset: return "UnknownAsset";
    case Err::UnknownChain: return "UnknownChain";
    case Err::ZeroAmount: return "ZeroAmount";
    case Err::Overflow: return "Overflow";
    case Err::InsufficientDepth: return "InsufficientDepth";
    case Err::InsufficientTraderBalance: return "InsufficientTraderBalance";
    case Err::InsufficientFunds: return "InsufficientFunds";
    case Err::DeadlineInPast: return "DeadlineInPast";
    case Err::PriceBelowLimit: return "PriceBelowLimit";
    case Err::FragmentTooSmall: return "FragmentTooSmall";
    case Err::IntentClosed: return "IntentClosed";
    case Err::UnknownIntent: return "UnknownIntent";
    case Err::InsufficientTakerFunds: return "InsufficientTakerFunds";
    case Err::AlreadyLocked: return "AlreadyLocked";
    case Err::AlreadyVoted: return "AlreadyVoted";
    case Err::ValidatorSlashed: return "ValidatorSlashed";
    case Err::UnknownValidator: return "UnknownValidator";
    case Err::RecordNotLocked: return "RecordNotLocked";
    case Err::NotTimedOut: return "NotTimedOut";
    case Err::AlreadyFinalized: return "AlreadyFinalized";
    case Err::UnknownSigner: return "UnknownSigner";
    case Err::UnknownRecord: return "UnknownRecord";
    case Err::LeverageExceeded: return "LeverageExceeded";
    case Err::InsufficientVaultLiquidity: return "InsufficientVaultLiquidity";
    case Err::InsufficientShares: return "InsufficientShares";
    case Err::VaultIlliquid: return "VaultIlliquid";
    case Err::VaultInsolvent: return "VaultInsolvent";
    case Err::Shortfall: return "Shortfall";
    case Err::PositionHealthy: return "PositionHealthy";
    case Err::PositionClosed: return "PositionClosed";
    case Err::UnknownPosition: return "UnknownPosition";
    case Err::InvalidScenario: return "InvalidScenario";
  }
  return "Unknown";
}

Status Ledger::add_chain(ChainConfig cfg) {
  if (cfg.block_interval_ticks < 1) return Status(Err::InvalidScenario, "block_interval_ticks < 1");
  if (chains_.count(cfg.id)) return Status(Err::InvalidScenario, "duplicate chain id");
  chains_.emplace(cfg.id, std::move(cfg));
  return ok_status();
}

Status Ledger::add_asset(AssetInfo asset) {
  if (asset.decimals < 0 || asset.decimals > 18) return Status(Err::InvalidScenario, "decimals out of [0,18]");
  if (assets_.count(asset.symbol)) return Status(Err::InvalidScenario, "duplicate asset symbol");
  assets_.emplace(asset.symbol, std::move(asset));
  return ok_status();
}

Status Ledger::mint(const AccountKey& acct, const std::string& asset, Amount amount) {
  if (!has_chain(acct.chain)) return Status(Err::UnknownChain, acct.owner);
  if (!has_asset(asset)) return Status(Err::UnknownAsset, asset);
  if (amount <= 0 || amount > kMaxAmount) return Status(Err::ZeroAmount, "mint amount out of range");
  balances_[acct][asset] += amount;
  minted_[asset] += amount;
  return ok_status();
}

Result<Transfer> Ledger::apply_transfer(const AccountKey& from, const AccountKey& to,
                                        const std::string& asset, Amount amount) {
  Transfer t{from, to, asset, amount, now_, Transfer::Status::rejected};
  if (!has_asset(asset)) return Result<Transfer>(Err::UnknownAsset, asset);
  if (from.chain != to.chain)
    return Result<Transfer>(Err::UnknownChain, "cross-chain moves require a settlement record");
  if (!has_chain(from.chain)) return Result<Transfer>(Err::UnknownChain, from.owner);
  if (amount <= 0) return Result<Transfer>(Err::ZeroAmount, "transfer amount must be positive");
  if (amount > kMaxAmount) return Result<Transfer>(Err::Overflow, "amount above integer domain");
  auto it = balances_.find(from);
  if (it == balances_.end()) return Result<Transfer>(Err::UnknownAccount, from.owner);
  auto bit = it->second.find(asset);
  Amount have = bit == it->second.end() ? 0 : bit->second;
  if (have < amount) return Result<Transfer>(Err::InsufficientBalance, from.owner + "/" + asset);
  it->second[asset] = have - amount;
  balances_[to][asset] += amount;
  t.status = Transfer::Status::applied;
  return Result<Transfer>(t);
}

Status Ledger::advance_clock(Tick ticks) {
  if (ticks < 0) return Status(Err::InvalidScenario, "negative tick advance");
  now_ += ticks;
  return ok_status();
}

Result<int64_t> Ledger::height(ChainNum chain) const {
  auto it = chains_.find(chain);
  if (it == chains_.end()) return Result<int64_t>(Err::UnknownChain, std::to_string(chain));
  return Result<int64_t>(now_ / it->second.block_interval_ticks);
}

Amount Ledger::balance(const AccountKey& acct, const std::string& asset) const {
  auto it = balances_.find(acct);
  if (it == balances_.end()) return 0;
  auto bit = it->second.find(asset);
  return bit == it->second.end() ? 0 : bit->second;
}

Result<__int128> Ledger::total_supply(const std::string& asset) const {
  if (!has_asset(asset)) return Result<__int128>(Err::UnknownAsset, asset);
  __int128 sum = 0;
  for (const auto& [acct, bals] : balances_) {
    auto bit = bals.find(asset);
    if (bit != bals.end()) sum += bit->second;
  }
  return Result<__int128>(sum);
}

__int128 Ledger::minted_supply(const std::string& asset) const {
  auto it = minted_.find(asset);
  return it == minted_.end() ? 0 : it->second;
}

}  // namespace flux
