#pragma once

// Shared scenario fixtures for the simulation and acceptance suites.
// Base setup: a BTC/USDT constant-product pool on a slow chain (12-tick
// blocks, 64-block native finality) quoted against an external venue, with
// the counter leg settling on a fast chain. BTC uses 4 decimals so one base
// unit is 1e-4 BTC; USDT uses 0 decimals.

#include "flux/scenario.hpp"

namespace fluxtest {

inline flux::Scenario base_scenario() {
  using namespace flux;
  Scenario s;
  s.seed = 1;
  s.horizon_ticks = 60;
  s.mode = RunMode::fluxlayer;
  s.settlement_fee = 2;
  s.bridge_delay_ticks = 10;

  s.chains = {
      {0, "arbchain", 12, 64, false, 2, "USDT"},
      {1, "counterchain", 1, 0, false, 1, "USDT"},
  };
  s.assets = {{"BTC", 4}, {"USDT", 0}};

  s.pools = {{0, 0, 1, "BTC", "USDT", 1'000'000, 6'000'000, 30, 0}};

  BookSpec book;
  book.id = 0;
  book.base = "BTC";
  book.quote = "USDT";
  book.taker_fee_bps = 10;
  book.levels = 5;
  book.level_size = 200'000;  // 20 BTC per level
  book.half_spread_bps = 2;
  book.level_step_bps = 5;
  book.price.initial = Rational(60'000);
  s.books = {book};

  s.validators = {
      {0, 40, ValidatorBehavior::honest, 2},
      {1, 35, ValidatorBehavior::honest, 2},
      {2, 25, ValidatorBehavior::honest, 2},
  };
  s.quorum = {2, 3, 40, 10000};

  s.vault.enabled = true;
  s.vault.chain = 0;
  s.vault.params = {"USDT", Rational(10), 500, 10, 1, 0};

  SearcherSpec searcher;
  searcher.id = 0;
  searcher.min_profit_threshold = 10;
  searcher.uses_vault = false;
  searcher.fill_policy = FillPolicyKind::fragmentable;
  searcher.min_fragment_bps = 500;
  searcher.intent_deadline_ticks = 20;
  searcher.limit_slack_bps = 15;
  s.searchers = {searcher};

  s.takers = {{0, 10, 500'000}};
  s.lps = {{0, 0, 1'000'000}};

  s.accounts = {
      {"searcher:0", 0, {{"USDT", 200'000}}},
      {"searcher:0", 1, {{"USDT", 200'000}}},
      {"taker:0", 0, {{"BTC", 2'000'000}}},
      {"taker:0", 1, {{"USDT", 3'000'000}}},
      {"lp:0", 0, {{"USDT", 1'200'000}}},
  };
  return s;
}

// One persistent price gap: the venue trades at `venue_price` forever while
// the pool starts at 60,000.
inline flux::Scenario gap_scenario(int64_t venue_price) {
  flux::Scenario s = base_scenario();
  s.books[0].price.initial = flux::Rational(venue_price);
  return s;
}

}  // namespace fluxtest
