#include "doctest.h"

#include "flux/scenario.hpp"
#include "testworld.hpp"

using namespace flux;

namespace {

std::string minimal_json() {
  return R"({
    "schema_version": 1,
    "seed": 7,
    "horizon_ticks": 10,
    "mode": "fluxlayer",
    "chains": [{"id": 0, "name": "one", "block_interval_ticks": 1, "native_finality_blocks": 0}],
    "assets": [{"symbol": "BTC", "decimals": 4}, {"symbol": "USDT", "decimals": 0}],
    "pools": [{"id": 0, "chain": 0, "counter_chain": 0, "asset_x": "BTC", "asset_y": "USDT",
               "reserve_x": 1000, "reserve_y": 6000, "fee_bps": 30, "book": 0}],
    "cex_books": [{"id": 0, "base": "BTC", "quote": "USDT", "taker_fee_bps": 10,
                   "levels": 2, "level_size": 100, "half_spread_bps": 2, "level_step_bps": 5,
                   "price": {"initial": 60000}}],
    "validators": [{"id": 0, "restake": 100}]
  })";
}

}  // namespace

TEST_CASE("minimal scenario loads") {
  auto r = parse_scenario(minimal_json());
  REQUIRE(r.ok());
  const Scenario& s = r.value();
  CHECK(s.seed == 7);
  CHECK(s.pools.size() == 1);
  CHECK(s.books[0].price.initial == Rational(60'000));
  CHECK(s.quorum.threshold_num == 2);  // defaults apply
  CHECK(!s.vault.enabled);
}

TEST_CASE("unknown fields are rejected with the field name") {
  std::string text = minimal_json();
  text.insert(text.rfind('}'), R"(, "surprise": 1)");
  auto r = parse_scenario(text);
  REQUIRE(!r.ok());
  CHECK(r.code() == Err::InvalidScenario);
  CHECK(r.error().detail.find("surprise") != std::string::npos);
}

TEST_CASE("duplicate chain ids are rejected") {
  std::string text = minimal_json();
  text.replace(text.find(R"("chains": [{"id": 0, "name": "one")"),
               std::string(R"("chains": [{"id": 0, "name": "one")").size(),
               R"("chains": [{"id": 0, "name": "one", "block_interval_ticks": 1, "native_finality_blocks": 0},
                  {"id": 0, "name": "two")");
  auto r = parse_scenario(text);
  REQUIRE(!r.ok());
  CHECK(r.error().detail.find("duplicate chain id") != std::string::npos);
}

TEST_CASE("pool referencing an unknown asset names the field") {
  std::string text = minimal_json();
  size_t pos = text.find(R"("asset_x": "BTC")");
  text.replace(pos, std::string(R"("asset_x": "BTC")").size(), R"("asset_x": "DOGE")");
  auto r = parse_scenario(text);
  REQUIRE(!r.ok());
  CHECK(r.error().detail.find("asset_x") != std::string::npos);
  CHECK(r.error().detail.find("DOGE") != std::string::npos);
}

TEST_CASE("book pair must match the pool pair") {
  std::string text = minimal_json();
  size_t pos = text.find(R"("base": "BTC")");
  text.replace(pos, std::string(R"("base": "BTC")").size(), R"("base": "USDT")");
  // Now the book is USDT/USDT which also fails ordering; check either way.
  auto r = parse_scenario(text);
  CHECK(!r.ok());
}

TEST_CASE("malformed json reports a parse error") {
  auto r = parse_scenario("{ not json");
  REQUIRE(!r.ok());
  CHECK(r.error().detail.find("parse error") != std::string::npos);
}

TEST_CASE("quorum threshold bounds are enforced") {
  std::string text = minimal_json();
  text.insert(text.rfind('}'),
              R"(, "quorum": {"threshold_num": 1, "threshold_den": 2, "timeout_ticks": 10})");
  auto r = parse_scenario(text);
  REQUIRE(!r.ok());
  CHECK(r.error().detail.find("threshold") != std::string::npos);
}

TEST_CASE("contractless chains require an mpc policy") {
  std::string text = minimal_json();
  size_t pos = text.find(R"("native_finality_blocks": 0}])");
  text.replace(pos, std::string(R"("native_finality_blocks": 0}])").size(),
               R"("native_finality_blocks": 0, "no_smart_contracts": true}])");
  auto r = parse_scenario(text);
  REQUIRE(!r.ok());
  CHECK(r.error().detail.find("mpc") != std::string::npos);

  text.insert(text.rfind('}'),
              R"(, "mpc_policies": [{"chain": 0, "signers": ["a","b","c"], "threshold": 2}])");
  auto r2 = parse_scenario(text);
  REQUIRE(r2.ok());
  CHECK(r2.value().mpc_policies.size() == 1);
  CHECK(r2.value().mpc_policies[0].online.size() == 3);  // defaults to all signers
}

TEST_CASE("programmatic scenarios round-trip through json") {
  Scenario s = fluxtest::base_scenario();
  std::string text = scenario_to_json(s);
  auto r = parse_scenario(text);
  REQUIRE(r.ok());
  const Scenario& back = r.value();
  CHECK(back.seed == s.seed);
  CHECK(back.horizon_ticks == s.horizon_ticks);
  CHECK(back.chains.size() == s.chains.size());
  CHECK(back.pools.size() == s.pools.size());
  CHECK(back.books[0].price.initial == s.books[0].price.initial);
  CHECK(back.vault.enabled == s.vault.enabled);
  CHECK(back.searchers.size() == s.searchers.size());
  CHECK(back.accounts.size() == s.accounts.size());
  // Re-serialization is byte-stable.
  CHECK(scenario_to_json(back) == text);
}

TEST_CASE("vault-less scenarios reject lps and vault searchers") {
  Scenario s = fluxtest::base_scenario();
  s.vault.enabled = false;
  std::string text = scenario_to_json(s);
  auto r = parse_scenario(text);
  REQUIRE(!r.ok());
  CHECK(r.error().detail.find("vault") != std::string::npos);
}
