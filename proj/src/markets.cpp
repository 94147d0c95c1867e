#include "flux/markets.hpp"

#include <algorithm>
#include <cassert>

namespace flux {

namespace {

constexpr int64_t kBpsDen = 10000;

int64_t slippage_bps_of(const Rational& reference, const Rational& effective) {
  if (reference.is_zero()) return 0;
  Rational slip = (reference - effective) / reference * Rational(kBpsDen);
  if (slip.sign() < 0) slip = -slip;
  auto v = slip.floor().to_i64();
  return v ? *v : 0;
}

}  // namespace

BigInt isqrt(const BigInt& n) {
  assert(n.sign() >= 0);
  if (n <= BigInt(1)) return n;
  BigInt x = n;
  BigInt y = (x + BigInt(1)) / BigInt(2);
  while (y < x) {
    x = y;
    y = (x + n / x) / BigInt(2);
  }
  return x;
}

Result<Quote> amm_quote(Amount reserve_in, Amount reserve_out, int fee_bps, Amount amount_in) {
  if (reserve_in <= 0 || reserve_out <= 0) return Result<Quote>(Err::Overflow, "empty pool");
  if (fee_bps < 0 || fee_bps > 1000) return Result<Quote>(Err::Overflow, "fee_bps out of range");
  if (amount_in < 0) return Result<Quote>(Err::ZeroAmount, "negative amount");
  if (amount_in > kMaxAmount || reserve_in > kMaxAmount || reserve_out > kMaxAmount)
    return Result<Quote>(Err::Overflow, "amount above integer domain");

  Quote q;
  q.amount_in = amount_in;
  q.spot_before = Rational(BigInt(reserve_out), BigInt(reserve_in));
  if (amount_in == 0) {
    q.spot_after = q.spot_before;
    return Result<Quote>(q);
  }

  const unsigned __int128 gn = static_cast<unsigned __int128>(kBpsDen - fee_bps);
  const unsigned __int128 in_net = static_cast<unsigned __int128>(amount_in) * gn;
  const unsigned __int128 num = static_cast<unsigned __int128>(reserve_out) * in_net;
  const unsigned __int128 den =
      static_cast<unsigned __int128>(reserve_in) * kBpsDen + in_net;
  q.amount_out = static_cast<Amount>(num / den);
  q.fee_paid = static_cast<Amount>(
      static_cast<unsigned __int128>(amount_in) * static_cast<unsigned>(fee_bps) / kBpsDen);
  q.spot_after = Rational(BigInt(reserve_out - q.amount_out), BigInt(reserve_in + amount_in));
  Rational effective(BigInt(q.amount_out), BigInt(amount_in));
  q.slippage_bps = slippage_bps_of(q.spot_before, effective);
  return Result<Quote>(q);
}

Result<Quote> amm_quote_exact_in(const AmmPool& pool, const Ledger& ledger,
                                 const std::string& asset_in, Amount amount_in) {
  Amount rx = ledger.balance(pool.account(), pool.asset_x);
  Amount ry = ledger.balance(pool.account(), pool.asset_y);
  if (asset_in == pool.asset_x) return amm_quote(rx, ry, pool.fee_bps, amount_in);
  if (asset_in == pool.asset_y) return amm_quote(ry, rx, pool.fee_bps, amount_in);
  return Result<Quote>(Err::UnknownAsset, asset_in);
}

Result<Quote> amm_swap(const AmmPool& pool, Ledger& ledger, const AccountKey& trader,
                       const std::string& asset_in, Amount amount_in) {
  if (amount_in <= 0) return Result<Quote>(Err::ZeroAmount, "swap amount must be positive");
  auto quoted = amm_quote_exact_in(pool, ledger, asset_in, amount_in);
  if (!quoted.ok()) return quoted;
  const Quote& q = quoted.value();
  const std::string& asset_out = asset_in == pool.asset_x ? pool.asset_y : pool.asset_x;

  const AccountKey pool_acct = pool.account();
  unsigned __int128 k_before = static_cast<unsigned __int128>(ledger.balance(pool_acct, pool.asset_x)) *
                               static_cast<unsigned __int128>(ledger.balance(pool_acct, pool.asset_y));

  auto in_leg = ledger.apply_transfer(trader, pool_acct, asset_in, amount_in);
  if (!in_leg.ok()) {
    if (in_leg.code() == Err::InsufficientBalance || in_leg.code() == Err::UnknownAccount)
      return Result<Quote>(Err::InsufficientTraderBalance, trader.owner);
    return Result<Quote>(in_leg.error());
  }
  if (q.amount_out > 0) {
    auto out_leg = ledger.apply_transfer(pool_acct, trader, asset_out, q.amount_out);
    assert(out_leg.ok());
    (void)out_leg;
  }

  unsigned __int128 k_after = static_cast<unsigned __int128>(ledger.balance(pool_acct, pool.asset_x)) *
                              static_cast<unsigned __int128>(ledger.balance(pool_acct, pool.asset_y));
  assert(k_after >= k_before);
  (void)k_before;
  (void)k_after;
  return Result<Quote>(q);
}

Rational amm_spot(const AmmPool& pool, const Ledger& ledger) {
  Amount rx = ledger.balance(pool.account(), pool.asset_x);
  Amount ry = ledger.balance(pool.account(), pool.asset_y);
  assert(rx > 0);
  return Rational(BigInt(ry), BigInt(rx));
}

Status validate_book(const CexBook& book) {
  if (book.taker_fee_bps < 0 || book.taker_fee_bps > 1000)
    return Status(Err::InvalidScenario, "taker_fee_bps out of range");
  for (size_t i = 0; i < book.bids.size(); ++i) {
    if (book.bids[i].size <= 0 || book.bids[i].price.sign() <= 0)
      return Status(Err::InvalidScenario, "bid level must have positive price and size");
    if (i > 0 && !(book.bids[i].price < book.bids[i - 1].price))
      return Status(Err::InvalidScenario, "bids must be strictly descending");
  }
  for (size_t i = 0; i < book.asks.size(); ++i) {
    if (book.asks[i].size <= 0 || book.asks[i].price.sign() <= 0)
      return Status(Err::InvalidScenario, "ask level must have positive price and size");
    if (i > 0 && !(book.asks[i].price > book.asks[i - 1].price))
      return Status(Err::InvalidScenario, "asks must be strictly ascending");
  }
  if (!book.bids.empty() && !book.asks.empty() && !(book.bids[0].price < book.asks[0].price))
    return Status(Err::InvalidScenario, "best bid must be below best ask");
  return ok_status();
}

Rational cex_mid(const CexBook& book) {
  if (book.bids.empty() && book.asks.empty()) return Rational();
  if (book.bids.empty()) return book.asks[0].price;
  if (book.asks.empty()) return book.bids[0].price;
  return (book.bids[0].price + book.asks[0].price) / Rational(2);
}

static Result<Quote> cex_walk_impl(CexBook& book, Side side, Amount base_amount, bool mutate) {
  if (base_amount <= 0) return Result<Quote>(Err::ZeroAmount, "fill amount must be positive");
  if (base_amount > kMaxAmount) return Result<Quote>(Err::Overflow, "amount above integer domain");

  std::vector<CexLevel>& ladder = side == Side::sell ? book.bids : book.asks;
  const Rational best = ladder.empty() ? Rational() : ladder[0].price;

  Quote q;
  Rational gross;
  Amount remaining = base_amount;
  size_t consumed = 0;
  for (CexLevel& level : ladder) {
    if (remaining == 0) break;
    Amount take = std::min(level.size, remaining);
    gross += level.price * Rational(take);
    remaining -= take;
    if (mutate) {
      level.size -= take;
      if (level.size == 0) ++consumed;
    }
  }
  if (mutate && consumed > 0) ladder.erase(ladder.begin(), ladder.begin() + consumed);

  const Amount filled = base_amount - remaining;
  q.partial = remaining > 0;
  q.spot_before = best;
  q.spot_after = best;
  if (filled == 0) return Result<Quote>(q);

  Rational effective = gross / Rational(filled);
  if (side == Side::sell) {
    auto gross_q = gross.floor().to_i64();
    if (!gross_q || *gross_q > kMaxAmount) return Result<Quote>(Err::Overflow, "proceeds overflow");
    Amount net = static_cast<Amount>(
        static_cast<__int128>(*gross_q) * (kBpsDen - book.taker_fee_bps) / kBpsDen);
    q.amount_in = filled;
    q.amount_out = net;
    q.fee_paid = *gross_q - net;
    q.slippage_bps = slippage_bps_of(best, effective);
  } else {
    auto gross_q = gross.ceil().to_i64();
    if (!gross_q || *gross_q > kMaxAmount) return Result<Quote>(Err::Overflow, "cost overflow");
    Amount fee = static_cast<Amount>(
        (static_cast<__int128>(*gross_q) * book.taker_fee_bps + kBpsDen - 1) / kBpsDen);
    q.amount_in = *gross_q + fee;
    q.amount_out = filled;
    q.fee_paid = fee;
    q.slippage_bps = slippage_bps_of(effective, best);  // effective >= best when buying
  }
  if (!ladder.empty()) q.spot_after = ladder[0].price;
  return Result<Quote>(q);
}

Result<Quote> cex_quote(const CexBook& book, Side side, Amount base_amount) {
  CexBook copy = book;
  return cex_walk_impl(copy, side, base_amount, false);
}

Result<Quote> cex_fill(CexBook& book, Side side, Amount base_amount) {
  return cex_walk_impl(book, side, base_amount, true);
}

namespace {

Amount clamp_candidate(const BigInt& v) {
  auto i = v.to_i64();
  if (!i) return v.sign() < 0 ? 0 : kMaxAmount;
  return std::clamp<Amount>(*i, 0, kMaxAmount);
}

// Raw constant-product output; domain already validated by callers.
Amount amm_out_fast(Amount reserve_in, Amount reserve_out, int fee_bps, Amount amount_in) {
  const unsigned __int128 gn = static_cast<unsigned __int128>(kBpsDen - fee_bps);
  const unsigned __int128 in_net = static_cast<unsigned __int128>(amount_in) * gn;
  return static_cast<Amount>(static_cast<unsigned __int128>(reserve_out) * in_net /
                             (static_cast<unsigned __int128>(reserve_in) * kBpsDen + in_net));
}

// One direction of the arb search. The integer profit curve
// P*floor(out(a)) - a only rises where the floored output jumps, so the
// global integer optimum sits on a jump point: the minimal input a_k that
// reaches output k. Scanning k outward from the continuous optimum and
// stopping once the smooth profit envelope falls below the incumbent keeps
// the search exact without walking the whole domain.
struct DirectionScan {
  Amount reserve_in;
  Amount reserve_out;
  int fee_bps;
  bool buying_base;  // profit = P*out - in when buying base, out - P*in otherwise
};

void scan_direction(const DirectionScan& d, const Rational& price, Amount k_center,
                    ArbDirection dir, ArbPlan& plan, Rational& best_profit) {
  if (k_center <= 0) return;
  const double price_dbl = price.to_double();
  const unsigned __int128 gn = static_cast<unsigned __int128>(kBpsDen - d.fee_bps);

  // Minimal input reaching output k, or 0 when out of domain.
  auto input_for = [&](Amount k) -> Amount {
    if (k <= 0 || k >= d.reserve_out) return 0;
    unsigned __int128 num = static_cast<unsigned __int128>(k) *
                            static_cast<unsigned __int128>(d.reserve_in) * kBpsDen;
    unsigned __int128 den = gn * static_cast<unsigned __int128>(d.reserve_out - k);
    unsigned __int128 a = (num + den - 1) / den;
    if (a == 0 || a > static_cast<unsigned __int128>(kMaxAmount)) return 0;
    return static_cast<Amount>(a);
  };

  // Smooth envelope at jump k: profit of the un-floored curve at input a_k.
  // Doubles only decide when to stop scanning, never who wins.
  auto envelope = [&](Amount k) -> double {
    Amount a = input_for(k);
    if (a == 0) return -1e300;
    double af = static_cast<double>(a);
    double g = static_cast<double>(d.reserve_out) * af * static_cast<double>(kBpsDen - d.fee_bps) /
               (static_cast<double>(d.reserve_in) * kBpsDen + af * static_cast<double>(kBpsDen - d.fee_bps));
    return d.buying_base ? price_dbl * g - af : g - price_dbl * af;
  };

  const Amount cap = 300'000;  // safety bound; realistic scans stay tiny

  // With both price components in 63 bits every candidate profit is an
  // exact __int128 numerator over the price denominator, so the scan never
  // touches arbitrary-precision arithmetic.
  auto pn64 = price.num().to_i64();
  auto pd64 = price.den().to_i64();
  if (pn64 && pd64 && *pn64 > 0 && *pd64 > 0) {
    const __int128 pn = *pn64, pd = *pd64;
    __int128 best_num = 0;
    Amount best_a = 0, best_out = 0;
    auto eval = [&](Amount k) {
      Amount a = input_for(k);
      if (a == 0) return;
      Amount out = amm_out_fast(d.reserve_in, d.reserve_out, d.fee_bps, a);
      __int128 num = d.buying_base ? pn * out - pd * a : pd * out - pn * a;
      if (num > best_num) {
        best_num = num;
        best_a = a;
        best_out = out;
      }
    };
    auto local_best_dbl = [&] {
      return static_cast<double>(best_num) / static_cast<double>(pd);
    };
    eval(k_center);
    for (Amount k = k_center + 1; k < d.reserve_out && k <= k_center + cap; ++k) {
      double margin = 2.0 + 1e-9 * (price_dbl * static_cast<double>(k));
      if (k > k_center + 2 && envelope(k) < local_best_dbl() - margin) break;
      eval(k);
    }
    for (Amount k = k_center - 1; k >= 1 && k >= k_center - cap; --k) {
      double margin = 2.0 + 1e-9 * (price_dbl * static_cast<double>(k));
      if (k < k_center - 2 && envelope(k) < local_best_dbl() - margin) break;
      eval(k);
    }
    if (best_num > 0) {
      Rational profit(BigInt::from_i128(best_num), BigInt::from_i128(pd));
      if (profit > best_profit) {
        best_profit = profit;
        plan.direction = dir;
        plan.amount_in = best_a;
        plan.expected_out = best_out;
        plan.expected_profit = profit;
      }
    }
    return;
  }

  // General path for oversized price components.
  double best_dbl = best_profit.is_zero() ? 0.0 : best_profit.to_double();
  auto eval = [&](Amount k) {
    Amount a = input_for(k);
    if (a == 0) return;
    Amount out = amm_out_fast(d.reserve_in, d.reserve_out, d.fee_bps, a);
    double approx = d.buying_base ? price_dbl * static_cast<double>(out) - static_cast<double>(a)
                                  : static_cast<double>(out) - price_dbl * static_cast<double>(a);
    double guard = 2.0 + 1e-9 * (price_dbl * static_cast<double>(out) + static_cast<double>(a));
    if (approx <= best_dbl - guard) return;
    Rational profit = d.buying_base ? price * Rational(out) - Rational(a)
                                    : Rational(out) - price * Rational(a);
    if (profit > best_profit) {
      best_profit = profit;
      plan.direction = dir;
      plan.amount_in = a;
      plan.expected_out = out;
      plan.expected_profit = profit;
      best_dbl = profit.to_double();
    }
  };
  eval(k_center);
  for (Amount k = k_center + 1; k < d.reserve_out && k <= k_center + cap; ++k) {
    double margin = 2.0 + 1e-9 * (price_dbl * static_cast<double>(k));
    if (k > k_center + 2 && envelope(k) < best_dbl - margin) break;
    eval(k);
  }
  for (Amount k = k_center - 1; k >= 1 && k >= k_center - cap; --k) {
    double margin = 2.0 + 1e-9 * (price_dbl * static_cast<double>(k));
    if (k < k_center - 2 && envelope(k) < best_dbl - margin) break;
    eval(k);
  }
}

}  // namespace

ArbPlan optimal_arb_size_core(Amount rx, Amount ry, int fee_bps, const Rational& external_price) {
  ArbPlan plan;
  if (rx <= 0 || ry <= 0 || external_price.sign() <= 0) return plan;
  if (rx > kMaxAmount || ry > kMaxAmount) return plan;

  const BigInt gn(kBpsDen - fee_bps);
  const BigInt gd(kBpsDen);
  const BigInt x(rx), y(ry);
  const BigInt& pn = external_price.num();
  const BigInt& pd = external_price.den();

  // Continuous optima. buy_base: dy* = (sqrt(P*x*y*gamma) - y)/gamma with
  // gamma = gn/gd, evaluated as (isqrt(A*B) - y*B) * gd / (B*gn), A = pn*x*y*gn,
  // B = pd*gd. sell_base mirrors with gamma/P inside the root.
  BigInt b1 = pd * gd;
  BigInt s1 = isqrt(pn * x * y * gn * b1);
  Amount center_buy_in = clamp_candidate((s1 - y * b1) * gd / (b1 * gn));

  BigInt b2 = pn * gd;
  BigInt s2 = isqrt(x * y * gn * pd * b2);
  Amount center_sell_in = clamp_candidate((s2 - x * b2) * gd / (b2 * gn));

  Rational best_profit;
  if (center_buy_in > 0) {
    Amount kc = amm_out_fast(ry, rx, fee_bps, center_buy_in);
    scan_direction({ry, rx, fee_bps, true}, external_price, std::max<Amount>(kc, 1),
                   ArbDirection::buy_base, plan, best_profit);
  }
  if (center_sell_in > 0) {
    Amount kc = amm_out_fast(rx, ry, fee_bps, center_sell_in);
    scan_direction({rx, ry, fee_bps, false}, external_price, std::max<Amount>(kc, 1),
                   ArbDirection::sell_base, plan, best_profit);
  }

  if (best_profit.sign() <= 0) return ArbPlan{};
  return plan;
}

ArbPlan optimal_arb_size(const AmmPool& pool, const Ledger& ledger, const Rational& external_price) {
  Amount rx = ledger.balance(pool.account(), pool.asset_x);
  Amount ry = ledger.balance(pool.account(), pool.asset_y);
  return optimal_arb_size_core(rx, ry, pool.fee_bps, external_price);
}

}  // namespace flux
