#include "flux/vault.hpp"

#include <cassert>

#include "flux/intent.hpp"

namespace flux {

Result<Amount> Vault::deposit(const std::string& lp, ChainNum chain, Amount amount, Ledger& ledger) {
  if (amount <= 0) return Result<Amount>(Err::ZeroAmount, "deposit");
  Rational pre_equity = equity(ledger);
  Amount shares;
  if (total_shares_ == 0) {
    shares = amount;  // share price initializes at 1
  } else {
    if (pre_equity.sign() <= 0) return Result<Amount>(Err::VaultInsolvent);
    shares = (Rational(amount) * Rational(total_shares_) / pre_equity).floor().to_i64().value_or(0);
    if (shares <= 0) return Result<Amount>(Err::ZeroAmount, "deposit below one share");
  }
  auto moved = ledger.apply_transfer({lp, chain}, cash_account(chain), params_.asset, amount);
  if (!moved.ok()) {
    if (moved.code() == Err::InsufficientBalance || moved.code() == Err::UnknownAccount)
      return Result<Amount>(Err::InsufficientFunds, lp);
    return Result<Amount>(moved.error());
  }
  lp_shares_[lp] += shares;
  total_shares_ += shares;
  return Result<Amount>(shares);
}

Result<Amount> Vault::withdraw(const std::string& lp, ChainNum chain, Amount shares, Ledger& ledger) {
  if (shares <= 0) return Result<Amount>(Err::ZeroAmount, "withdraw");
  auto it = lp_shares_.find(lp);
  if (it == lp_shares_.end() || it->second < shares) return Result<Amount>(Err::InsufficientShares);
  Rational eq = equity(ledger);
  Amount payout = (Rational(shares) * eq / Rational(total_shares_)).floor().to_i64().value_or(0);
  if (payout > available_liquidity(ledger, chain))
    return Result<Amount>(Err::VaultIlliquid, "withdrawal exceeds free cash");
  it->second -= shares;
  total_shares_ -= shares;
  if (payout > 0) {
    auto moved = ledger.apply_transfer(cash_account(chain), {lp, chain}, params_.asset, payout);
    assert(moved.ok());
    (void)moved;
  }
  return Result<Amount>(payout);
}

Result<PositionId> Vault::borrow(const std::string& maker, ChainNum chain, Amount collateral,
                                 Amount principal, Ledger& ledger, Tick now) {
  if (collateral <= 0 || principal <= 0) return Result<PositionId>(Err::ZeroAmount);
  if (Rational(collateral + principal) > params_.max_leverage * Rational(collateral))
    return Result<PositionId>(Err::LeverageExceeded);
  if (principal > available_liquidity(ledger, chain))
    return Result<PositionId>(Err::InsufficientVaultLiquidity);

  auto posted = ledger.apply_transfer({maker, chain}, cash_account(chain), params_.asset, collateral);
  if (!posted.ok()) {
    if (posted.code() == Err::InsufficientBalance || posted.code() == Err::UnknownAccount)
      return Result<PositionId>(Err::InsufficientFunds, maker);
    return Result<PositionId>(posted.error());
  }
  auto disbursed = ledger.apply_transfer(cash_account(chain),
                                         IntentBook::funding_account(maker, chain), params_.asset,
                                         principal);
  assert(disbursed.ok());
  (void)disbursed;

  LoanPosition p;
  p.id = next_id_++;
  p.maker = maker;
  p.chain = chain;
  p.collateral = collateral;
  p.principal = principal;
  p.opened_tick = now;
  collateral_held_[chain] += collateral;
  PositionId id = p.id;
  positions_.emplace(id, std::move(p));
  return Result<PositionId>(id);
}

void Vault::mark_and_accrue(Tick now) {
  if (params_.epoch_ticks <= 0) return;
  const Rational step = Rational(1) + Rational::of(params_.interest_rate_bps_per_epoch, 10000);
  for (auto& [id, p] : positions_) {
    if (p.state != LoanPosition::State::open) continue;
    int64_t target = (now - p.opened_tick) / params_.epoch_ticks;
    while (p.epochs_accrued < target) {
      p.interest_factor *= step;
      ++p.epochs_accrued;
    }
  }
}

Result<Amount> Vault::repay(PositionId id, Ledger& ledger) {
  auto it = positions_.find(id);
  if (it == positions_.end()) return Result<Amount>(Err::UnknownPosition);
  LoanPosition& p = it->second;
  if (p.state != LoanPosition::State::open) return Result<Amount>(Err::PositionClosed);

  const Amount debt = p.debt_units();
  __int128 funding_total = 0;
  std::vector<std::pair<ChainNum, Amount>> funding;
  for (const auto& [chain_id, cfg] : ledger.chains()) {
    Amount bal = ledger.balance(IntentBook::funding_account(p.maker, chain_id), params_.asset);
    if (bal > 0) funding.push_back({chain_id, bal});
    funding_total += bal;
  }
  if (funding_total + p.collateral < debt) return Result<Amount>(Err::Shortfall);

  // Pay from funding cash first, then out of collateral.
  Amount still_owed = debt;
  for (auto& [chain_id, bal] : funding) {
    Amount pay = std::min(bal, still_owed);
    if (pay > 0) {
      auto r = ledger.apply_transfer(IntentBook::funding_account(p.maker, chain_id),
                                     cash_account(chain_id), params_.asset, pay);
      assert(r.ok());
      (void)r;
      still_owed -= pay;
      bal -= pay;
    }
  }
  Amount collateral_return = p.collateral - still_owed;  // still_owed covered by collateral
  collateral_held_[p.chain] -= p.collateral;

  // Residual = leftover funding cash + returned collateral.
  Amount residual = collateral_return;
  for (auto& [chain_id, bal] : funding) residual += bal;

  // Optional profit share to LPs, taken before the maker is paid out.
  Amount profit = residual - p.collateral;
  Amount share = 0;
  if (profit > 0 && params_.profit_share_bps > 0) {
    share = static_cast<Amount>(static_cast<__int128>(profit) * params_.profit_share_bps / 10000);
  }

  Amount to_take = share;
  for (auto& [chain_id, bal] : funding) {
    if (bal <= 0) continue;
    Amount cut = std::min(bal, to_take);
    if (cut > 0) {
      auto r = ledger.apply_transfer(IntentBook::funding_account(p.maker, chain_id),
                                     cash_account(chain_id), params_.asset, cut);
      assert(r.ok());
      (void)r;
      bal -= cut;
      to_take -= cut;
    }
    if (bal > 0) {
      auto r = ledger.apply_transfer(IntentBook::funding_account(p.maker, chain_id),
                                     {p.maker, chain_id}, params_.asset, bal);
      assert(r.ok());
      (void)r;
    }
  }
  if (to_take > 0) {
    // Remaining share cut stays in vault cash: simply pay out less collateral.
    assert(to_take <= collateral_return);
    collateral_return -= to_take;
  }
  if (collateral_return > 0) {
    auto r = ledger.apply_transfer(cash_account(p.chain), {p.maker, p.chain}, params_.asset,
                                   collateral_return);
    assert(r.ok());
    (void)r;
  }

  p.state = LoanPosition::State::repaid;
  return Result<Amount>(residual - share);
}

bool Vault::margin_breached(const LoanPosition& position, const Rational& position_value) const {
  Rational equity = position_value - Rational(position.principal) - position.accrued_interest();
  Rational notional(position.collateral + position.principal);
  // Strict inequality: exactly-at-margin positions stay healthy.
  return equity * Rational(10000) < Rational(params_.maintenance_margin_bps) * notional;
}

Result<Vault::LiquidationOutcome> Vault::liquidate(PositionId id, Ledger& ledger,
                                                   const Rational& position_value) {
  auto it = positions_.find(id);
  if (it == positions_.end()) return Result<LiquidationOutcome>(Err::UnknownPosition);
  LoanPosition& p = it->second;
  if (p.state != LoanPosition::State::open) return Result<LiquidationOutcome>(Err::PositionClosed);
  if (!margin_breached(p, position_value)) return Result<LiquidationOutcome>(Err::PositionHealthy);

  const Amount debt = p.debt_units();
  LiquidationOutcome out;

  // Seize vault-asset funding cash across chains.
  Amount seized = 0;
  for (const auto& [chain_id, cfg] : ledger.chains()) {
    AccountKey acct = IntentBook::funding_account(p.maker, chain_id);
    Amount bal = ledger.balance(acct, params_.asset);
    if (bal > 0) {
      auto r = ledger.apply_transfer(acct, cash_account(chain_id), params_.asset, bal);
      assert(r.ok());
      (void)r;
      seized += bal;
    }
    // Assets the liquidation cannot apply to vault-asset debt go back to the
    // maker rather than stranding in protocol custody.
    std::vector<std::pair<std::string, Amount>> other;
    auto ait = ledger.accounts().find(acct);
    if (ait != ledger.accounts().end())
      for (const auto& [sym, held] : ait->second)
        if (sym != params_.asset && held > 0) other.push_back({sym, held});
    for (const auto& [sym, held] : other) {
      auto r = ledger.apply_transfer(acct, {p.maker, chain_id}, sym, held);
      assert(r.ok());
      (void)r;
    }
  }

  Amount total_recoverable = seized + p.collateral;
  collateral_held_[p.chain] -= p.collateral;
  if (total_recoverable >= debt) {
    out.recovered = debt;
    out.maker_residual = total_recoverable - debt;
    if (out.maker_residual > 0) {
      auto r = ledger.apply_transfer(cash_account(p.chain), {p.maker, p.chain}, params_.asset,
                                     out.maker_residual);
      assert(r.ok());
      (void)r;
    }
  } else {
    out.recovered = total_recoverable;
    out.shortfall = debt - total_recoverable;
  }

  p.state = LoanPosition::State::liquidated;
  return Result<LiquidationOutcome>(out);
}

Rational Vault::equity(const Ledger& ledger) const {
  __int128 cash = 0;
  for (const auto& [chain_id, cfg] : ledger.chains())
    cash += ledger.balance(cash_account(chain_id), params_.asset);
  for (const auto& [chain_id, held] : collateral_held_) cash -= held;

  Rational eq(BigInt::from_i128(cash), BigInt(1));
  for (const auto& [id, p] : positions_) {
    if (p.state != LoanPosition::State::open) continue;
    eq += Rational(p.principal) + p.accrued_interest();
  }
  return eq;
}

Rational Vault::share_price(const Ledger& ledger) const {
  if (total_shares_ == 0) return Rational(1);
  return equity(ledger) / Rational(total_shares_);
}

Rational Vault::utilization(const Ledger& ledger) const {
  Amount borrowed = total_borrowed();
  __int128 avail = 0;
  for (const auto& [chain_id, cfg] : ledger.chains())
    avail += available_liquidity(ledger, chain_id);
  __int128 deposits = avail + borrowed;
  if (deposits <= 0) return Rational();
  return Rational(BigInt(borrowed), BigInt::from_u128(static_cast<unsigned __int128>(deposits)));
}

Amount Vault::total_borrowed() const {
  Amount sum = 0;
  for (const auto& [id, p] : positions_)
    if (p.state == LoanPosition::State::open) sum += p.principal;
  return sum;
}

Amount Vault::available_liquidity(const Ledger& ledger, ChainNum chain) const {
  Amount bal = ledger.balance(cash_account(chain), params_.asset);
  auto it = collateral_held_.find(chain);
  if (it != collateral_held_.end()) bal -= it->second;
  return bal < 0 ? 0 : bal;
}

Amount Vault::shares_of(const std::string& lp) const {
  auto it = lp_shares_.find(lp);
  return it == lp_shares_.end() ? 0 : it->second;
}

const LoanPosition* Vault::find(PositionId id) const {
  auto it = positions_.find(id);
  return it == positions_.end() ? nullptr : &it->second;
}

}  // namespace flux
