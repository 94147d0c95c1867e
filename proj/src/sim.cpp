#include "flux/sim.hpp"

#include <algorithm>
#include <cassert>

namespace flux {

namespace {

Rational bps_factor(int64_t bps) { return Rational::of(10000 + bps, 10000); }

// Quote value of a partially hedged amount: the filled part at its realized
// price, the remainder extrapolated at the same effective price.
Rational hedge_sell_value(const Quote& q, Amount requested) {
  if (q.amount_in <= 0) return Rational();
  Rational val(q.amount_out);
  if (q.amount_in < requested)
    val += Rational(q.amount_out) * Rational(requested - q.amount_in) / Rational(q.amount_in);
  return val;
}

Rational hedge_buy_cost(const Quote& q, Amount requested) {
  if (q.amount_out <= 0) return Rational();
  Rational cost(q.amount_in);
  if (q.amount_out < requested)
    cost += Rational(q.amount_in) * Rational(requested - q.amount_out) / Rational(q.amount_out);
  return cost;
}

}  // namespace

World::World(const Scenario& scenario) : scn_(scenario), engine_(scenario.quorum), vault_(scenario.vault.params) {
  for (const ChainConfig& c : scn_.chains) {
    auto st = ledger_.add_chain(c);
    assert(st.ok());
    (void)st;
  }
  for (const AssetInfo& a : scn_.assets) {
    auto st = ledger_.add_asset(a);
    assert(st.ok());
    (void)st;
  }
  for (const AccountSpec& acc : scn_.accounts)
    for (const auto& [sym, amt] : acc.balances) {
      auto st = ledger_.mint({acc.owner, acc.chain}, sym, amt);
      assert(st.ok());
      (void)st;
    }

  pools_.reserve(scn_.pools.size());
  for (const PoolSpec& p : scn_.pools) {
    AmmPool pool{p.id, p.chain, p.asset_x, p.asset_y, p.fee_bps, p.counter_chain};
    auto sx = ledger_.mint(pool.account(), p.asset_x, p.reserve_x);
    auto sy = ledger_.mint(pool.account(), p.asset_y, p.reserve_y);
    assert(sx.ok() && sy.ok());
    (void)sx;
    (void)sy;
    pool_index_[p.id] = pools_.size();
    pools_.push_back(pool);
  }

  books_.reserve(scn_.books.size());
  for (size_t i = 0; i < scn_.books.size(); ++i) {
    const BookSpec& b = scn_.books[i];
    CexBook book;
    book.id = b.id;
    book.base = b.base;
    book.quote = b.quote;
    book.taker_fee_bps = b.taker_fee_bps;
    book_index_[b.id] = books_.size();
    books_.push_back(book);
    processes_.emplace_back(b.price, scn_.seed ^ (0x9e3779b97f4a7c15ull * (static_cast<uint64_t>(b.id) + 1)));
    rebuild_book(i);
  }

  for (const ValidatorSpec& v : scn_.validators) {
    auto st = engine_.add_validator({v.id, v.restake});
    assert(st.ok());
    (void)st;
  }
  for (const MpcSpec& m : scn_.mpc_policies) engine_.set_mpc_policy(m.chain, m.policy, m.online);

  if (scn_.vault.enabled) {
    for (const LpSpec& lp : scn_.lps) {
      auto shares = vault_.deposit(Scenario::lp_owner(lp.id), lp.chain, lp.deposit, ledger_);
      assert(shares.ok());
      (void)shares;
    }
  }

  metrics_.seed = scn_.seed;
  metrics_.mode = scn_.mode == RunMode::fluxlayer ? "fluxlayer" : "baseline";
  metrics_.horizon_ticks = scn_.horizon_ticks;
}

Rational World::unit_scale(const std::string& base, const std::string& quote) const {
  return Rational(BigInt::ten_pow(static_cast<unsigned>(ledger_.asset(quote).decimals)),
                  BigInt::ten_pow(static_cast<unsigned>(ledger_.asset(base).decimals)));
}

void World::rebuild_book(size_t idx) {
  const BookSpec& spec = scn_.books[idx];
  CexBook& book = books_[idx];
  Rational mid = processes_[idx].price() * unit_scale(spec.base, spec.quote);
  book.bids.clear();
  book.asks.clear();
  for (int lvl = 0; lvl < spec.levels; ++lvl) {
    Rational off = Rational::of(spec.half_spread_bps + static_cast<int64_t>(lvl) * spec.level_step_bps, 10000);
    // Ladder prices live on a 1e-9 grid; everything derived stays small.
    book.bids.push_back({(mid * (Rational(1) - off)).rounded(9), spec.level_size});
    book.asks.push_back({(mid * (Rational(1) + off)).rounded(9), spec.level_size});
  }
}


void World::phase_prices() {
  for (size_t i = 0; i < books_.size(); ++i) {
    processes_[i].step();
    rebuild_book(i);
  }
}

std::vector<Detection> World::detect_opportunities() const {
  std::vector<Detection> out;
  for (const AmmPool& pool : pools_) {
    size_t bidx = 0;
    for (const PoolSpec& p : scn_.pools)
      if (p.id == pool.id) bidx = book_index_.at(p.book);
    const CexBook& book = books_[bidx];
    if (book.bids.empty() || book.asks.empty()) continue;

    Amount rx = ledger_.balance(pool.account(), pool.asset_x);
    Amount ry = ledger_.balance(pool.account(), pool.asset_y);
    const Rational fixed_fees = Rational(ledger_.chain(pool.chain).gas_per_tx) +
                                Rational(ledger_.chain(pool.counter_chain).gas_per_tx) +
                                Rational(scn_.settlement_fee);

    // Sell-to-venue leg realizes the bid net of taker fee.
    Rational bid_eff = book.bids[0].price * (Rational(1) - Rational::of(book.taker_fee_bps, 10000));
    ArbPlan plan = optimal_arb_size_core(rx, ry, pool.fee_bps, bid_eff);
    if (plan.direction == ArbDirection::buy_base && plan.amount_in > 0) {
      Rational net = plan.expected_profit - fixed_fees - Rational(ledger_.chain(pool.chain).gas_per_tx);
      if (net.sign() > 0)
        out.push_back({pool.id, ArbDirection::buy_base, plan.amount_in, plan.expected_out,
                       plan.expected_profit, net});
    }

    // Buy-from-venue leg pays the ask plus taker fee.
    Rational ask_eff = book.asks[0].price * bps_factor(book.taker_fee_bps);
    plan = optimal_arb_size_core(rx, ry, pool.fee_bps, ask_eff);
    if (plan.direction == ArbDirection::sell_base && plan.amount_in > 0) {
      Rational net = plan.expected_profit - fixed_fees;
      if (net.sign() > 0)
        out.push_back({pool.id, ArbDirection::sell_base, plan.amount_in, plan.expected_out,
                       plan.expected_profit, net});
    }
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.net_profit != b.net_profit) return b.net_profit < a.net_profit;
    if (a.pool != b.pool) return a.pool < b.pool;
    return static_cast<int>(a.direction) < static_cast<int>(b.direction);
  });
  return out;
}

void World::charge_gas(const AccountKey& payer, ChainNum chain, Flow* flow) {
  const ChainConfig& c = ledger_.chain(chain);
  if (c.gas_per_tx <= 0 || c.gas_asset.empty()) return;
  Amount pay = std::min(c.gas_per_tx, ledger_.balance(payer, c.gas_asset));
  if (pay <= 0) return;
  auto st = ledger_.apply_transfer(payer, {"fees", chain}, c.gas_asset, pay);
  assert(st.ok());
  (void)st;
  metrics_.gas_fees += Rational(pay);
  if (flow) flow->quote_spent += Rational(pay);
}

void World::dump_base(Flow& flow, const AccountKey& holder, Amount base_amount) {
  if (base_amount <= 0) return;
  const AmmPool& pool = pools_[flow.pool_idx];
  auto swapped = amm_swap(pool, ledger_, holder, pool.asset_x, base_amount);
  assert(swapped.ok());
  const Quote& q = swapped.value();
  flow.quote_received += Rational(q.amount_out);
  metrics_.amm_fees += Rational(q.fee_paid) * q.spot_before;
  metrics_.slippage_sum_bps += Rational(q.slippage_bps);
  metrics_.slippage_samples += 1;
  charge_gas(searcher_free(flow.searcher, pool.chain), pool.chain, &flow);
}

void World::execute_flow(int searcher_id, const SearcherSpec& spec, const Detection& d) {
  const size_t pool_idx = pool_index_.at(d.pool);
  const AmmPool& pool = pools_[pool_idx];
  size_t bidx = 0;
  for (const PoolSpec& p : scn_.pools)
    if (p.id == pool.id) bidx = book_index_.at(p.book);
  const CexBook& book = books_[bidx];
  const Tick now = ledger_.now();

  if (d.direction == ArbDirection::buy_base) {
    const ChainNum chain = pool.chain;
    const AccountKey own = searcher_free(searcher_id, chain);
    const Amount gas_float = 4 * ledger_.chain(chain).gas_per_tx;
    const Amount own_cash = ledger_.balance(own, pool.asset_y);

    Amount trade = 0;
    AccountKey trader = own;
    Funding funding{FundingKind::own_funds, -1};
    PositionId loan = -1;
    Amount collateral = 0;

    const bool vault_ok = spec.uses_vault && scn_.vault.enabled && scn_.vault.chain == chain &&
                          scn_.vault.params.asset == pool.asset_y;
    if (vault_ok) {
      const Rational lev_minus_one = scn_.vault.params.max_leverage - Rational(1);
      Amount c_max = own_cash - gas_float;
      if (c_max > 0 && lev_minus_one.sign() > 0) {
        Amount p_by_c = (Rational(c_max) * lev_minus_one).floor().to_i64().value_or(0);
        Amount principal = std::min({d.amount_in, p_by_c, vault_.available_liquidity(ledger_, chain)});
        if (principal > 0) {
          Amount c_need = (Rational(principal) / lev_minus_one).ceil().to_i64().value_or(c_max);
          if (c_need <= c_max && c_need > 0) {
            trade = principal;
            collateral = c_need;
          }
        }
      }
    }
    if (trade == 0) {
      trade = std::min(d.amount_in, own_cash - gas_float);
      if (trade <= 0) return;
    }

    // Re-check profitability at the funded size before committing anything.
    auto q = amm_quote_exact_in(pool, ledger_, pool.asset_y, trade);
    if (!q.ok() || q.value().amount_out <= 0) return;
    Rational bid_eff = book.bids[0].price * (Rational(1) - Rational::of(book.taker_fee_bps, 10000));
    Rational expect = bid_eff * Rational(q.value().amount_out) - Rational(trade)
                      - Rational(2 * ledger_.chain(chain).gas_per_tx)
                      - Rational(ledger_.chain(pool.counter_chain).gas_per_tx)
                      - Rational(scn_.settlement_fee);
    if (expect < Rational(spec.min_profit_threshold)) return;

    if (collateral > 0) {
      auto pos = vault_.borrow(Scenario::searcher_owner(searcher_id), chain, collateral, trade,
                               ledger_, now);
      if (!pos.ok()) return;
      loan = pos.value();
      funding = {FundingKind::vault_loan, loan};
      trader = IntentBook::funding_account(Scenario::searcher_owner(searcher_id), chain);
      metrics_.loans_opened += 1;
    }

    Flow flow;
    flow.searcher = searcher_id;
    flow.pool_idx = pool_idx;
    flow.dir = ArbDirection::buy_base;
    flow.loan = loan;
    metrics_.maker_capital_committed += Rational(collateral > 0 ? collateral : trade);

    auto swapped = amm_swap(pool, ledger_, trader, pool.asset_y, trade);
    assert(swapped.ok());
    const Quote& sq = swapped.value();
    flow.quote_spent += Rational(trade);
    metrics_.amm_fees += Rational(sq.fee_paid);
    metrics_.slippage_sum_bps += Rational(sq.slippage_bps);
    metrics_.slippage_samples += 1;
    charge_gas(own, chain, &flow);

    Intent intent;
    intent.maker = Scenario::searcher_owner(searcher_id);
    intent.sell_leg = {chain, pool.asset_x, sq.amount_out};
    intent.buy_leg = {pool.counter_chain, pool.asset_y, 0};
    intent.limit_price =
        book.bids[0].price * (Rational(1) - Rational::of(spec.limit_slack_bps, 10000));
    if (spec.fill_policy == FillPolicyKind::fragmentable) {
      Amount frag = std::max<Amount>(
          1, (Rational(sq.amount_out) * Rational::of(spec.min_fragment_bps, 10000)).floor().to_i64().value_or(1));
      intent.fill_policy = {FillPolicyKind::fragmentable, std::min(frag, sq.amount_out)};
    } else {
      intent.fill_policy = {FillPolicyKind::all_or_nothing, 0};
    }
    intent.deadline_tick = now + spec.intent_deadline_ticks;
    intent.funding = funding;

    auto iid = book_.submit_intent(intent, ledger_);
    assert(iid.ok());
    charge_gas(own, chain, &flow);

    flow.intent = iid.value();
    metrics_.intents_submitted += 1;
    metrics_.submitted_notional += Rational(book_.find(iid.value())->buy_leg.amount);
    flow_by_intent_[iid.value()] = flows_.size();
    active_flows_[searcher_id] += 1;
    flows_.push_back(std::move(flow));
    return;
  }

  // sell_base: buy base via intent at roughly the venue ask, dump into the
  // pool at finalization. Own funds only; escrow lives on the counter chain.
  const ChainNum chain = pool.counter_chain;
  const AccountKey own = searcher_free(searcher_id, chain);
  const Amount gas_float = 2 * ledger_.chain(chain).gas_per_tx +
                           2 * ledger_.chain(pool.chain).gas_per_tx;
  Rational price_cap = book.asks[0].price * bps_factor(spec.limit_slack_bps);
  Amount own_cash = ledger_.balance(own, pool.asset_y) - gas_float;
  if (own_cash <= 0) return;

  Amount want_base = d.amount_in;
  Amount escrow = (price_cap * Rational(want_base)).ceil().to_i64().value_or(kMaxAmount);
  if (escrow > own_cash) {
    want_base = (Rational(own_cash) / price_cap).floor().to_i64().value_or(0);
    escrow = own_cash;
  }
  if (want_base <= 0 || escrow <= 0) return;

  auto q = amm_quote_exact_in(pool, ledger_, pool.asset_x, want_base);
  if (!q.ok() || q.value().amount_out <= 0) return;
  Rational expect = Rational(q.value().amount_out) - price_cap * Rational(want_base) -
                    Rational(2 * ledger_.chain(pool.chain).gas_per_tx) -
                    Rational(ledger_.chain(chain).gas_per_tx) - Rational(scn_.settlement_fee);
  if (expect < Rational(spec.min_profit_threshold)) return;

  Flow flow;
  flow.searcher = searcher_id;
  flow.pool_idx = pool_idx;
  flow.dir = ArbDirection::sell_base;
  metrics_.maker_capital_committed += Rational(escrow);

  Intent intent;
  intent.maker = Scenario::searcher_owner(searcher_id);
  intent.sell_leg = {chain, pool.asset_y, escrow};
  intent.buy_leg = {pool.chain, pool.asset_x, 0};
  intent.limit_price = Rational(1) / price_cap;  // base units per quote unit
  if (spec.fill_policy == FillPolicyKind::fragmentable) {
    Amount frag = std::max<Amount>(
        1, (Rational(escrow) * Rational::of(spec.min_fragment_bps, 10000)).floor().to_i64().value_or(1));
    intent.fill_policy = {FillPolicyKind::fragmentable, std::min(frag, escrow)};
  } else {
    intent.fill_policy = {FillPolicyKind::all_or_nothing, 0};
  }
  intent.deadline_tick = now + spec.intent_deadline_ticks;

  auto iid = book_.submit_intent(intent, ledger_);
  assert(iid.ok());
  flow.quote_spent += Rational(escrow);
  charge_gas(own, chain, &flow);

  flow.intent = iid.value();
  metrics_.intents_submitted += 1;
  metrics_.submitted_notional += Rational(escrow);
  flow_by_intent_[iid.value()] = flows_.size();
  active_flows_[searcher_id] += 1;
  flows_.push_back(std::move(flow));
}

void World::phase_searchers() {
  if (scn_.searchers.empty()) return;
  std::vector<Detection> found = detect_opportunities();
  metrics_.opportunities_detected += static_cast<int64_t>(found.size());
  if (found.empty()) return;

  size_t next = 0;
  for (const SearcherSpec& spec : scn_.searchers) {
    if (next >= found.size()) break;
    if (active_flows_[spec.id] > 0) continue;  // one live flow per searcher
    const Detection& d = found[next++];
    if (d.net_profit < Rational(spec.min_profit_threshold)) continue;
    execute_flow(spec.id, spec, d);
  }
}

void World::phase_takers() {
  const Tick now = ledger_.now();
  for (const auto& [iid, intent] : book_.intents()) {
    if (intent.state != IntentState::open && intent.state != IntentState::partially_filled) continue;
    if (now >= intent.deadline_tick) continue;
    auto fit = flow_by_intent_.find(iid);
    if (fit == flow_by_intent_.end()) continue;
    const Flow& flow = flows_[fit->second];
    const AmmPool& pool = pools_[flow.pool_idx];
    size_t bidx = 0;
    for (const PoolSpec& p : scn_.pools)
      if (p.id == pool.id) bidx = book_index_.at(p.book);
    const CexBook& book = books_[bidx];
    if (book.bids.empty() || book.asks.empty()) continue;

    for (const TakerSpec& taker : scn_.takers) {
      FillOffer offer;
      offer.taker = Scenario::taker_owner(taker.id);
      offer.intent_id = iid;

      if (flow.dir == ArbDirection::buy_base) {
        // Taker pays quote on the counter chain at bid minus their spread.
        Rational price = book.bids[0].price * (Rational(1) - Rational::of(taker.spread_bps, 10000));
        if (price < intent.limit_price) continue;
        Amount cash = ledger_.balance({offer.taker, pool.counter_chain}, pool.asset_y);
        Amount afford = (Rational(cash) / price).floor().to_i64().value_or(0);
        Amount take = std::min({intent.remaining, taker.max_offer_amount, afford});
        while (take > 0 && (price * Rational(take)).ceil().to_i64().value_or(kMaxAmount) > cash) --take;
        if (take <= 0) continue;
        offer.take_amount = take;
        offer.price = price;
      } else {
        // Taker delivers base on the pool chain at ask plus their spread.
        Rational quote_per_base = book.asks[0].price * bps_factor(taker.spread_bps);
        Rational price = Rational(1) / quote_per_base;  // base per quote unit
        if (price < intent.limit_price) continue;
        Amount base_inv = ledger_.balance({offer.taker, pool.chain}, pool.asset_x);
        Amount inv_cap = std::min(base_inv, taker.max_offer_amount);
        Amount take = std::min(intent.remaining,
                               (Rational(inv_cap) * quote_per_base).floor().to_i64().value_or(0));
        while (take > 0 && (price * Rational(take)).ceil().to_i64().value_or(kMaxAmount) > base_inv) --take;
        if (take <= 0) continue;
        offer.take_amount = take;
        offer.price = price;
      }
      (void)book_.submit_offer(offer, now);  // book-level rejections are fine
    }
  }
}

void World::phase_match() {
  const Tick now = ledger_.now();
  for (MatchResult& result : book_.match_tick(now)) {
    auto fit = flow_by_intent_.find(result.intent_id);
    assert(fit != flow_by_intent_.end());
    Flow& flow = flows_[fit->second];
    const AmmPool& pool = pools_[flow.pool_idx];
    const Intent* intent = book_.find(result.intent_id);
    const std::string maker = intent->maker;
    const bool loan_funded = intent->funding.kind == FundingKind::vault_loan;

    for (const Fill& fill : result.fills) {
      SettlementRecord rec;
      rec.intent_id = result.intent_id;
      rec.maker = maker;
      rec.taker = fill.taker;
      if (flow.dir == ArbDirection::buy_base) {
        AccountKey maker_recv = loan_funded
                                    ? IntentBook::funding_account(maker, pool.counter_chain)
                                    : AccountKey{maker, pool.counter_chain};
        AccountKey maker_back = loan_funded ? IntentBook::funding_account(maker, pool.chain)
                                            : AccountKey{maker, pool.chain};
        rec.sell_leg = {pool.chain, pool.asset_x, fill.amount, IntentBook::escrow_account(pool.chain),
                        {fill.taker, pool.chain}, maker_back};
        rec.buy_leg = {pool.counter_chain, pool.asset_y, fill.buy_amount,
                       {fill.taker, pool.counter_chain}, maker_recv,
                       {fill.taker, pool.counter_chain}};
      } else {
        AccountKey maker_recv{maker, pool.chain};
        AccountKey maker_back{maker, pool.counter_chain};
        rec.sell_leg = {pool.counter_chain, pool.asset_y, fill.amount,
                        IntentBook::escrow_account(pool.counter_chain), {fill.taker, pool.counter_chain},
                        maker_back};
        rec.buy_leg = {pool.chain, pool.asset_x, fill.buy_amount, {fill.taker, pool.chain}, maker_recv,
                       {fill.taker, pool.chain}};
      }
      auto sid = engine_.create(rec, now);
      assert(sid.ok());
      result.settlements.push_back(sid.value());
      flow_by_settlement_[sid.value()] = fit->second;
      flow.open_settlements += 1;
      metrics_.settlements_created += 1;
    }
  }
}

void World::settle_fee(Flow& flow, const AccountKey& from, ChainNum chain) {
  if (scn_.settlement_fee <= 0) return;
  const AmmPool& pool = pools_[flow.pool_idx];
  Amount pay = std::min(scn_.settlement_fee, ledger_.balance(from, pool.asset_y));
  if (pay <= 0) return;
  auto st = ledger_.apply_transfer(from, {"fees", chain}, pool.asset_y, pay);
  assert(st.ok());
  (void)st;
  metrics_.settlement_fees += Rational(pay);
  flow.quote_spent += Rational(pay);
}

void World::on_finalized(SettlementId id) {
  const SettlementRecord* rec = engine_.find(id);
  Flow& flow = flows_[flow_by_settlement_.at(id)];
  const AmmPool& pool = pools_[flow.pool_idx];
  size_t bidx = 0;
  for (const PoolSpec& p : scn_.pools)
    if (p.id == pool.id) bidx = book_index_.at(p.book);

  metrics_.settlements_finalized += 1;
  metrics_.latencies.push_back(rec->latency());
  if (!flow.captured) {
    flow.captured = true;
    metrics_.opportunities_captured += 1;
  }
  flow.open_settlements -= 1;

  if (flow.dir == ArbDirection::buy_base) {
    flow.quote_received += Rational(rec->buy_leg.amount);
    settle_fee(flow, rec->buy_leg.recipient, rec->buy_leg.chain);

    // Taker offloads the received base on the external venue now; under slow
    // settlement the gap may have decayed out from under the hedge.
    auto hedge = cex_fill(books_[bidx], Side::sell, rec->sell_leg.amount);
    assert(hedge.ok());
    Rational proceeds = hedge_sell_value(hedge.value(), rec->sell_leg.amount);
    metrics_.taker_pnl_total += proceeds - Rational(rec->buy_leg.amount);
    metrics_.cex_fees += Rational(hedge.value().fee_paid);
    metrics_.slippage_sum_bps += Rational(hedge.value().slippage_bps);
    metrics_.slippage_samples += 1;
  } else {
    // Maker received base; realize it against the pool immediately.
    dump_base(flow, rec->buy_leg.recipient, rec->buy_leg.amount);
    settle_fee(flow, rec->buy_leg.recipient, rec->buy_leg.chain);

    auto hedge = cex_fill(books_[bidx], Side::buy, rec->buy_leg.amount);
    assert(hedge.ok());
    Rational cost = hedge_buy_cost(hedge.value(), rec->buy_leg.amount);
    metrics_.taker_pnl_total += Rational(rec->sell_leg.amount) - cost;
    metrics_.cex_fees += Rational(hedge.value().fee_paid);
    metrics_.slippage_sum_bps += Rational(hedge.value().slippage_bps);
    metrics_.slippage_samples += 1;
  }
}

void World::on_refunded(SettlementId id) {
  const SettlementRecord* rec = engine_.find(id);
  Flow& flow = flows_[flow_by_settlement_.at(id)];
  metrics_.settlements_refunded += 1;
  flow.open_settlements -= 1;
  if (flow.dir == ArbDirection::buy_base) {
    dump_base(flow, rec->sell_leg.refund_to, rec->sell_leg.amount);
  } else {
    flow.quote_received += Rational(rec->sell_leg.amount);
  }
}

void World::phase_settle() {
  const Tick now = ledger_.now();

  std::vector<SettlementId> created;
  for (const auto& [sid, rec] : engine_.records())
    if (rec.state == SettlementState::created) created.push_back(sid);
  for (SettlementId sid : created) {
    auto st = engine_.lock(sid, ledger_);
    const SettlementRecord* rec = engine_.find(sid);
    Flow& flow = flows_[flow_by_settlement_.at(sid)];
    if (!st.ok()) {
      assert(st.code() == Err::InsufficientTakerFunds);
      auto restored = book_.restore(rec->intent_id, rec->sell_leg.amount);
      assert(restored.ok());
      (void)restored;
      flow.open_settlements -= 1;
      metrics_.settlements_refunded += 1;
      continue;
    }
    // A locked fill counts as matched volume.
    metrics_.fills_total += 1;
    intents_with_fills_.insert(rec->intent_id);
    metrics_.matched_notional += flow.dir == ArbDirection::buy_base ? Rational(rec->buy_leg.amount)
                                                                    : Rational(rec->sell_leg.amount);
  }

  std::vector<SettlementId> locked;
  for (const auto& [sid, rec] : engine_.records())
    if (rec.state == SettlementState::locked) locked.push_back(sid);

  if (scn_.mode == RunMode::fluxlayer) {
    for (SettlementId sid : locked) {
      const SettlementRecord* rec = engine_.find(sid);
      for (const ValidatorSpec& v : scn_.validators) {
        if (now - rec->created_tick < v.vote_delay_ticks) continue;
        switch (v.behavior) {
          case ValidatorBehavior::honest:
            (void)engine_.attest(sid, v.id, true);
            break;
          case ValidatorBehavior::offline:
            break;
          case ValidatorBehavior::equivocate:
            (void)engine_.attest(sid, v.id, true);
            if (now - rec->created_tick > v.vote_delay_ticks) (void)engine_.attest(sid, v.id, false);
            break;
        }
      }
      auto fin = engine_.finalize(sid, ledger_, now);
      if (fin.ok() && fin.value()) on_finalized(sid);
    }
  } else {
    for (SettlementId sid : locked) {
      auto fin = engine_.baseline_bridge_settle(sid, ledger_, now, scn_.bridge_delay_ticks);
      if (fin.ok() && fin.value()) on_finalized(sid);
    }
  }
}

void World::phase_vault() {
  const Tick now = ledger_.now();
  if (scn_.vault.enabled) vault_.mark_and_accrue(now);

  for (size_t i = 0; i < flows_.size(); ++i) {
    Flow& flow = flows_[i];
    if (flow.closed || flow.open_settlements > 0) continue;
    const Intent* intent = book_.find(flow.intent);
    if (intent == nullptr) continue;
    if (intent->state == IntentState::open || intent->state == IntentState::partially_filled) continue;

    // Flow complete: settle any loan, then realize the searcher side net of
    // the financing the vault actually collected.
    Rational financing;
    if (flow.loan >= 0) {
      const LoanPosition* p = vault_.find(flow.loan);
      Amount interest = p->debt_units() - p->principal;
      auto repaid = vault_.repay(flow.loan, ledger_);
      if (repaid.ok()) {
        metrics_.loans_repaid += 1;
        metrics_.interest_paid += Rational(interest);
        financing = Rational(interest);
      } else {
        assert(repaid.code() == Err::Shortfall);
        __int128 funding_cash = 0;
        for (const auto& [cid, cfg] : ledger_.chains())
          funding_cash += ledger_.balance(IntentBook::funding_account(p->maker, cid),
                                          scn_.vault.params.asset);
        Rational value(BigInt::from_i128(funding_cash + p->collateral), BigInt(1));
        auto liq = vault_.liquidate(flow.loan, ledger_, value);
        assert(liq.ok());
        metrics_.loans_liquidated += 1;
        if (liq.value().recovered > p->principal)
          financing = Rational(liq.value().recovered - p->principal);
      }
    }
    metrics_.searcher_pnl_total += flow.quote_received - flow.quote_spent - financing;
    flow.closed = true;
    active_flows_[flow.searcher] -= 1;
  }
}

void World::phase_expiry() {
  const Tick now = ledger_.now();

  if (scn_.mode == RunMode::fluxlayer) {
    std::vector<SettlementId> locked;
    for (const auto& [sid, rec] : engine_.records())
      if (rec.state == SettlementState::locked &&
          now - rec.created_tick >= engine_.rule().timeout_ticks)
        locked.push_back(sid);
    for (SettlementId sid : locked) {
      auto st = engine_.refund_on_timeout(sid, ledger_, now);
      if (st.ok()) on_refunded(sid);
    }
  }

  for (const IntentBook::Refund& refund : book_.expire_and_cancel(ledger_, now)) {
    auto fit = flow_by_intent_.find(refund.intent_id);
    if (fit == flow_by_intent_.end()) continue;
    Flow& flow = flows_[fit->second];
    if (flow.dir == ArbDirection::buy_base) {
      dump_base(flow, refund.to, refund.amount);
    } else {
      flow.quote_received += Rational(refund.amount);
    }
  }
}

void World::check_conservation() {
  for (const auto& [sym, info] : ledger_.assets()) {
    auto total = ledger_.total_supply(sym);
    if (!total.ok() || total.value() != ledger_.minted_supply(sym)) {
      metrics_.conservation_ok = false;
      assert(false && "supply conservation violated");
    }
  }
}

void World::phase_metrics() {
  check_conservation();
  SeriesRow row;
  row.tick = ledger_.now();
  row.mev_cum = metrics_.searcher_pnl_total + metrics_.taker_pnl_total;
  row.settlements_finalized = metrics_.settlements_finalized;
  row.mean_latency = metrics_.latency_mean();
  row.utilization = scn_.vault.enabled ? vault_.utilization(ledger_) : Rational();
  row.share_price = scn_.vault.enabled ? vault_.share_price(ledger_) : Rational(1);
  row.slippage_mean_bps = metrics_.slippage_mean_bps();
  metrics_.series.push_back(std::move(row));
}

void World::step() {
  phase_prices();
  phase_searchers();
  phase_takers();
  phase_match();
  phase_settle();
  phase_vault();
  phase_expiry();
  phase_metrics();
  auto st = ledger_.advance_clock(1);
  assert(st.ok());
  (void)st;
}

MetricsReport World::run() {
  for (Tick t = 0; t < scn_.horizon_ticks; ++t) step();
  for (const auto& [iid, intent] : book_.intents())
    if (intent.state == IntentState::filled) metrics_.intents_filled += 1;
  metrics_.intents_with_fills = static_cast<int64_t>(intents_with_fills_.size());
  metrics_.share_price_final = scn_.vault.enabled ? vault_.share_price(ledger_) : Rational(1);
  metrics_.utilization_final = scn_.vault.enabled ? vault_.utilization(ledger_) : Rational();
  Rational ret = metrics_.share_price_final - Rational(1);
  if (scn_.ticks_per_year > 0 && scn_.horizon_ticks > 0)
    ret = ret * Rational(scn_.ticks_per_year) / Rational(scn_.horizon_ticks);
  metrics_.lp_apy = ret;
  return metrics_;
}

MetricsReport run_scenario(const Scenario& scenario) { return World(scenario).run(); }

PairedOutcome run_paired(Scenario scenario) {
  PairedOutcome out;
  scenario.mode = RunMode::fluxlayer;
  out.flux = run_scenario(scenario);
  scenario.mode = RunMode::baseline;
  out.baseline = run_scenario(scenario);
  return out;
}

}  // namespace flux
