#pragma once

#include <map>
#include <string>

#include "flux/ledger.hpp"
#include "flux/rational.hpp"
#include "flux/result.hpp"
#include "flux/types.hpp"

namespace flux {

struct VaultParams {
  std::string asset;                    // single-asset vault
  Rational max_leverage = Rational(10); // (collateral+principal)/collateral cap
  int maintenance_margin_bps = 500;
  int interest_rate_bps_per_epoch = 10;
  Tick epoch_ticks = 1;
  int profit_share_bps = 0;  // optional cut of maker profit routed to LPs on repay
};

struct LoanPosition {
  PositionId id = -1;
  std::string maker;
  ChainNum chain = 0;   // collateral and disbursement chain
  Amount collateral = 0;
  Amount principal = 0;
  Tick opened_tick = 0;
  int64_t epochs_accrued = 0;
  Rational interest_factor = Rational(1);  // compounds (1 + r) per epoch
  enum class State { open, repaid, liquidated } state = LoanPosition::State::open;

  Rational accrued_interest() const {
    return Rational(principal) * (interest_factor - Rational(1));
  }
  // Debt in base units; interest rounds up toward the vault.
  Amount debt_units() const {
    return principal + accrued_interest().ceil().to_i64().value_or(kMaxAmount);
  }
  Rational leverage() const {
    return Rational(collateral + principal) / Rational(collateral);
  }
};

// Protocol-level lending vault. LP cash sits in per-chain vault accounts;
// equity is the cross-chain sum, so loans can repay on whichever chain the
// proceeds land. Borrowed principal is disbursed to the maker's protocol
// funding account and never leaves custody.
class Vault {
 public:
  Vault() = default;
  explicit Vault(VaultParams params) : params_(std::move(params)) {}

  static AccountKey cash_account(ChainNum chain) { return {"vault", chain}; }

  Result<Amount> deposit(const std::string& lp, ChainNum chain, Amount amount, Ledger& ledger);
  Result<Amount> withdraw(const std::string& lp, ChainNum chain, Amount shares, Ledger& ledger);

  Result<PositionId> borrow(const std::string& maker, ChainNum chain, Amount collateral,
                            Amount principal, Ledger& ledger, Tick now);

  // Compounds interest on every open position up to `now`.
  void mark_and_accrue(Tick now);

  // Settles principal + interest from the maker's funding accounts plus
  // collateral; pays the residual to the maker's free account.
  Result<Amount> repay(PositionId id, Ledger& ledger);

  struct LiquidationOutcome {
    Amount recovered = 0;       // applied against the debt
    Amount shortfall = 0;       // socialized to LPs via share price
    Amount maker_residual = 0;  // returned when seizure exceeds the debt
  };
  // Seizes funding-account cash and collateral. `position_value` is the
  // mark of everything the position controls, in vault-asset units.
  Result<LiquidationOutcome> liquidate(PositionId id, Ledger& ledger,
                                       const Rational& position_value);

  bool margin_breached(const LoanPosition& position, const Rational& position_value) const;

  Rational equity(const Ledger& ledger) const;
  Rational share_price(const Ledger& ledger) const;  // 1 while no shares exist
  Rational utilization(const Ledger& ledger) const;
  Amount total_borrowed() const;
  Amount available_liquidity(const Ledger& ledger, ChainNum chain) const;

  const VaultParams& params() const { return params_; }
  Amount total_shares() const { return total_shares_; }
  Amount shares_of(const std::string& lp) const;
  const std::map<PositionId, LoanPosition>& positions() const { return positions_; }
  const LoanPosition* find(PositionId id) const;

 private:
  VaultParams params_;
  std::map<std::string, Amount> lp_shares_;
  Amount total_shares_ = 0;
  std::map<ChainNum, Amount> collateral_held_;
  std::map<PositionId, LoanPosition> positions_;
  PositionId next_id_ = 0;
};

}  // namespace flux
