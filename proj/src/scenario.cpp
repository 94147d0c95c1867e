#include "flux/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace flux {

using ordered_json = nlohmann::ordered_json;

namespace {

struct FieldError {
  std::string message;
};

[[noreturn]] void fail(const std::string& where, const std::string& why) {
  throw FieldError{where + ": " + why};
}

void check_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(where, "unknown field '" + it.key() + "'");
}

const ordered_json& need(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

int64_t get_int(const ordered_json& obj, const char* key, const std::string& where) {
  const ordered_json& v = need(obj, key, where);
  if (v.is_number_integer()) return v.get<int64_t>();
  if (v.is_number_unsigned()) return static_cast<int64_t>(v.get<uint64_t>());
  if (v.is_string()) {
    auto big = BigInt::from_decimal(v.get<std::string>());
    if (big) {
      auto i = big->to_i64();
      if (i) return *i;
    }
  }
  fail(where, std::string("field '") + key + "' must be an integer");
}

int64_t get_int_or(const ordered_json& obj, const char* key, const std::string& where,
                   int64_t fallback) {
  return obj.contains(key) ? get_int(obj, key, where) : fallback;
}

Amount get_amount(const ordered_json& obj, const char* key, const std::string& where,
                  Amount lo = 0) {
  int64_t v = get_int(obj, key, where);
  if (v < lo || v > kMaxAmount)
    fail(where, std::string("field '") + key + "' out of range");
  return v;
}

double get_double(const ordered_json& obj, const char* key, const std::string& where,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const ordered_json& v = obj.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (...) {
    }
  }
  fail(where, std::string("field '") + key + "' must be numeric");
}

Rational get_rational(const ordered_json& obj, const char* key, const std::string& where) {
  const ordered_json& v = need(obj, key, where);
  if (v.is_number_integer()) return Rational(v.get<int64_t>());
  if (v.is_number_unsigned()) return Rational(static_cast<int64_t>(v.get<uint64_t>()));
  if (v.is_string()) {
    auto r = Rational::from_decimal(v.get<std::string>());
    if (r) return *r;
  }
  fail(where, std::string("field '") + key + "' must be an integer or decimal string");
}

std::string get_string(const ordered_json& obj, const char* key, const std::string& where) {
  const ordered_json& v = need(obj, key, where);
  if (!v.is_string()) fail(where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Scenario parse_impl(const std::string& text) {
  ordered_json root = ordered_json::parse(text);  // json::exception on bad syntax

  check_keys(root,
             {"schema_version", "seed", "horizon_ticks", "mode", "ticks_per_year", "settlement_fee",
              "bridge_delay_ticks", "chains", "assets", "accounts", "pools", "cex_books",
              "validators", "quorum", "mpc_policies", "vault", "agents"},
             "scenario");

  Scenario s;
  s.schema_version = static_cast<int>(get_int(root, "schema_version", "scenario"));
  if (s.schema_version != 1) fail("scenario", "unsupported schema_version");
  s.seed = static_cast<uint64_t>(get_int(root, "seed", "scenario"));
  s.horizon_ticks = get_int(root, "horizon_ticks", "scenario");
  if (s.horizon_ticks < 0) fail("scenario", "horizon_ticks must be >= 0");

  std::string mode = get_string(root, "mode", "scenario");
  if (mode == "fluxlayer")
    s.mode = RunMode::fluxlayer;
  else if (mode == "baseline")
    s.mode = RunMode::baseline;
  else
    fail("scenario", "mode must be 'fluxlayer' or 'baseline'");

  s.ticks_per_year = get_int_or(root, "ticks_per_year", "scenario", 0);
  s.settlement_fee = root.contains("settlement_fee") ? get_amount(root, "settlement_fee", "scenario") : 0;
  s.bridge_delay_ticks = get_int_or(root, "bridge_delay_ticks", "scenario", 0);
  if (s.bridge_delay_ticks < 0) fail("scenario", "bridge_delay_ticks must be >= 0");

  // chains
  for (const auto& jc : need(root, "chains", "scenario")) {
    std::string where = "chains[" + std::to_string(s.chains.size()) + "]";
    check_keys(jc,
               {"id", "name", "block_interval_ticks", "native_finality_blocks", "no_smart_contracts",
                "gas_per_tx", "gas_asset"},
               where);
    ChainConfig c;
    c.id = static_cast<ChainNum>(get_int(jc, "id", where));
    c.name = get_string(jc, "name", where);
    c.block_interval_ticks = get_int(jc, "block_interval_ticks", where);
    if (c.block_interval_ticks < 1) fail(where, "block_interval_ticks must be >= 1");
    c.native_finality_blocks = get_int(jc, "native_finality_blocks", where);
    if (c.native_finality_blocks < 0) fail(where, "native_finality_blocks must be >= 0");
    c.no_smart_contracts = jc.contains("no_smart_contracts") && jc.at("no_smart_contracts").get<bool>();
    c.gas_per_tx = jc.contains("gas_per_tx") ? get_amount(jc, "gas_per_tx", where) : 0;
    c.gas_asset = jc.contains("gas_asset") ? get_string(jc, "gas_asset", where) : "";
    s.chains.push_back(std::move(c));
  }
  if (s.chains.empty()) fail("chains", "at least one chain required");

  // assets
  for (const auto& ja : need(root, "assets", "scenario")) {
    std::string where = "assets[" + std::to_string(s.assets.size()) + "]";
    check_keys(ja, {"symbol", "decimals"}, where);
    AssetInfo a;
    a.symbol = get_string(ja, "symbol", where);
    a.decimals = static_cast<int>(get_int(ja, "decimals", where));
    if (a.decimals < 0 || a.decimals > 18) fail(where, "decimals out of [0,18]");
    s.assets.push_back(std::move(a));
  }
  if (s.assets.empty()) fail("assets", "at least one asset required");

  // accounts
  if (root.contains("accounts")) {
    for (const auto& jacc : root.at("accounts")) {
      std::string where = "accounts[" + std::to_string(s.accounts.size()) + "]";
      check_keys(jacc, {"owner", "chain", "balances"}, where);
      AccountSpec acc;
      acc.owner = get_string(jacc, "owner", where);
      acc.chain = static_cast<ChainNum>(get_int(jacc, "chain", where));
      const ordered_json& bal = need(jacc, "balances", where);
      if (!bal.is_object()) fail(where, "balances must be an object");
      for (auto it = bal.begin(); it != bal.end(); ++it) {
        ordered_json wrapper{{it.key(), it.value()}};
        acc.balances[it.key()] = get_amount(wrapper, it.key().c_str(), where + ".balances", 1);
      }
      s.accounts.push_back(std::move(acc));
    }
  }

  // pools
  for (const auto& jp : need(root, "pools", "scenario")) {
    std::string where = "pools[" + std::to_string(s.pools.size()) + "]";
    check_keys(jp,
               {"id", "chain", "counter_chain", "asset_x", "asset_y", "reserve_x", "reserve_y",
                "fee_bps", "book"},
               where);
    PoolSpec p;
    p.id = static_cast<PoolId>(get_int(jp, "id", where));
    p.chain = static_cast<ChainNum>(get_int(jp, "chain", where));
    p.counter_chain = static_cast<ChainNum>(get_int(jp, "counter_chain", where));
    p.asset_x = get_string(jp, "asset_x", where);
    p.asset_y = get_string(jp, "asset_y", where);
    p.reserve_x = get_amount(jp, "reserve_x", where, 1);
    p.reserve_y = get_amount(jp, "reserve_y", where, 1);
    p.fee_bps = static_cast<int>(get_int(jp, "fee_bps", where));
    if (p.fee_bps < 0 || p.fee_bps > 1000) fail(where, "fee_bps out of [0,1000]");
    p.book = static_cast<BookId>(get_int(jp, "book", where));
    s.pools.push_back(std::move(p));
  }

  // cex books
  for (const auto& jb : need(root, "cex_books", "scenario")) {
    std::string where = "cex_books[" + std::to_string(s.books.size()) + "]";
    check_keys(jb,
               {"id", "base", "quote", "taker_fee_bps", "levels", "level_size", "half_spread_bps",
                "level_step_bps", "price"},
               where);
    BookSpec b;
    b.id = static_cast<BookId>(get_int(jb, "id", where));
    b.base = get_string(jb, "base", where);
    b.quote = get_string(jb, "quote", where);
    b.taker_fee_bps = static_cast<int>(get_int(jb, "taker_fee_bps", where));
    if (b.taker_fee_bps < 0 || b.taker_fee_bps > 1000) fail(where, "taker_fee_bps out of [0,1000]");
    b.levels = static_cast<int>(get_int(jb, "levels", where));
    if (b.levels < 1 || b.levels > 64) fail(where, "levels out of [1,64]");
    b.level_size = get_amount(jb, "level_size", where, 1);
    b.half_spread_bps = static_cast<int>(get_int(jb, "half_spread_bps", where));
    b.level_step_bps = static_cast<int>(get_int(jb, "level_step_bps", where));
    if (b.half_spread_bps < 1 || b.level_step_bps < 1) fail(where, "spread and step must be >= 1 bps");

    const ordered_json& jp = need(jb, "price", where);
    std::string pwhere = where + ".price";
    check_keys(jp,
               {"initial", "drift_bps_per_tick", "vol_bps_per_tick", "jump_prob", "jump_size_bps",
                "jump_revert_halflife_ticks"},
               pwhere);
    b.price.initial = get_rational(jp, "initial", pwhere);
    if (b.price.initial.sign() <= 0) fail(pwhere, "initial price must be positive");
    b.price.drift_bps_per_tick = get_double(jp, "drift_bps_per_tick", pwhere, 0.0);
    b.price.vol_bps_per_tick = get_double(jp, "vol_bps_per_tick", pwhere, 0.0);
    if (b.price.vol_bps_per_tick < 0) fail(pwhere, "vol must be >= 0");
    b.price.jump_prob = get_double(jp, "jump_prob", pwhere, 0.0);
    if (b.price.jump_prob < 0 || b.price.jump_prob > 1) fail(pwhere, "jump_prob out of [0,1]");
    b.price.jump_size_bps = get_double(jp, "jump_size_bps", pwhere, 0.0);
    b.price.jump_revert_halflife_ticks = get_int_or(jp, "jump_revert_halflife_ticks", pwhere, 0);
    if (b.price.jump_revert_halflife_ticks < 0) fail(pwhere, "halflife must be >= 0");
    s.books.push_back(std::move(b));
  }

  // validators
  if (root.contains("validators")) {
    for (const auto& jv : root.at("validators")) {
      std::string where = "validators[" + std::to_string(s.validators.size()) + "]";
      check_keys(jv, {"id", "restake", "behavior", "vote_delay_ticks"}, where);
      ValidatorSpec v;
      v.id = static_cast<ValidatorId>(get_int(jv, "id", where));
      v.restake = get_amount(jv, "restake", where, 1);
      std::string b = jv.contains("behavior") ? get_string(jv, "behavior", where) : "honest";
      if (b == "honest")
        v.behavior = ValidatorBehavior::honest;
      else if (b == "offline")
        v.behavior = ValidatorBehavior::offline;
      else if (b == "equivocate")
        v.behavior = ValidatorBehavior::equivocate;
      else
        fail(where, "behavior must be honest|offline|equivocate");
      v.vote_delay_ticks = get_int_or(jv, "vote_delay_ticks", where, 1);
      if (v.vote_delay_ticks < 0) fail(where, "vote_delay_ticks must be >= 0");
      s.validators.push_back(std::move(v));
    }
  }

  // quorum
  if (root.contains("quorum")) {
    const ordered_json& jq = root.at("quorum");
    check_keys(jq, {"threshold_num", "threshold_den", "timeout_ticks", "slash_fraction_bps"}, "quorum");
    s.quorum.threshold_num = get_int(jq, "threshold_num", "quorum");
    s.quorum.threshold_den = get_int(jq, "threshold_den", "quorum");
    if (s.quorum.threshold_den <= 0 ||
        2 * s.quorum.threshold_num <= s.quorum.threshold_den ||
        s.quorum.threshold_num > s.quorum.threshold_den)
      fail("quorum", "threshold must satisfy 1/2 < num/den <= 1");
    s.quorum.timeout_ticks = get_int(jq, "timeout_ticks", "quorum");
    if (s.quorum.timeout_ticks < 1) fail("quorum", "timeout_ticks must be >= 1");
    s.quorum.slash_fraction_bps = static_cast<int>(get_int_or(jq, "slash_fraction_bps", "quorum", 10000));
    if (s.quorum.slash_fraction_bps < 0 || s.quorum.slash_fraction_bps > 10000)
      fail("quorum", "slash_fraction_bps out of [0,10000]");
  }

  // mpc policies
  if (root.contains("mpc_policies")) {
    for (const auto& jm : root.at("mpc_policies")) {
      std::string where = "mpc_policies[" + std::to_string(s.mpc_policies.size()) + "]";
      check_keys(jm, {"chain", "signers", "threshold", "online"}, where);
      MpcSpec m;
      m.chain = static_cast<ChainNum>(get_int(jm, "chain", where));
      for (const auto& js : need(jm, "signers", where)) m.policy.signers.push_back(js.get<std::string>());
      m.policy.threshold = static_cast<int>(get_int(jm, "threshold", where));
      if (m.policy.threshold < 1 || m.policy.threshold > static_cast<int>(m.policy.signers.size()))
        fail(where, "threshold out of [1, n]");
      if (jm.contains("online")) {
        for (const auto& js : jm.at("online")) m.online.push_back(js.get<std::string>());
      } else {
        m.online = m.policy.signers;
      }
      s.mpc_policies.push_back(std::move(m));
    }
  }

  // vault
  if (root.contains("vault")) {
    const ordered_json& jv = root.at("vault");
    check_keys(jv,
               {"enabled", "asset", "chain", "max_leverage", "maintenance_margin_bps",
                "interest_rate_bps_per_epoch", "epoch_ticks", "profit_share_bps"},
               "vault");
    s.vault.enabled = jv.contains("enabled") ? jv.at("enabled").get<bool>() : true;
    s.vault.chain = static_cast<ChainNum>(get_int(jv, "chain", "vault"));
    s.vault.params.asset = get_string(jv, "asset", "vault");
    s.vault.params.max_leverage =
        jv.contains("max_leverage") ? get_rational(jv, "max_leverage", "vault") : Rational(10);
    if (s.vault.params.max_leverage < Rational(1)) fail("vault", "max_leverage must be >= 1");
    s.vault.params.maintenance_margin_bps =
        static_cast<int>(get_int_or(jv, "maintenance_margin_bps", "vault", 500));
    s.vault.params.interest_rate_bps_per_epoch =
        static_cast<int>(get_int_or(jv, "interest_rate_bps_per_epoch", "vault", 10));
    s.vault.params.epoch_ticks = get_int_or(jv, "epoch_ticks", "vault", 1);
    if (s.vault.params.epoch_ticks < 1) fail("vault", "epoch_ticks must be >= 1");
    s.vault.params.profit_share_bps = static_cast<int>(get_int_or(jv, "profit_share_bps", "vault", 0));
    if (s.vault.params.profit_share_bps < 0 || s.vault.params.profit_share_bps > 10000)
      fail("vault", "profit_share_bps out of [0,10000]");
  }

  // agents
  if (root.contains("agents")) {
    const ordered_json& ja = root.at("agents");
    check_keys(ja, {"searchers", "takers", "lps"}, "agents");
    if (ja.contains("searchers")) {
      for (const auto& js : ja.at("searchers")) {
        std::string where = "agents.searchers[" + std::to_string(s.searchers.size()) + "]";
        check_keys(js,
                   {"id", "min_profit_threshold", "uses_vault", "fill_policy", "min_fragment_bps",
                    "intent_deadline_ticks", "limit_slack_bps"},
                   where);
        SearcherSpec sp;
        sp.id = static_cast<int>(get_int(js, "id", where));
        sp.min_profit_threshold = get_amount(js, "min_profit_threshold", where);
        sp.uses_vault = js.contains("uses_vault") && js.at("uses_vault").get<bool>();
        std::string policy = js.contains("fill_policy") ? get_string(js, "fill_policy", where)
                                                        : "fragmentable";
        if (policy == "fragmentable")
          sp.fill_policy = FillPolicyKind::fragmentable;
        else if (policy == "all_or_nothing")
          sp.fill_policy = FillPolicyKind::all_or_nothing;
        else
          fail(where, "fill_policy must be fragmentable|all_or_nothing");
        sp.min_fragment_bps = static_cast<int>(get_int_or(js, "min_fragment_bps", where, 1000));
        if (sp.min_fragment_bps < 1 || sp.min_fragment_bps > 10000)
          fail(where, "min_fragment_bps out of [1,10000]");
        sp.intent_deadline_ticks = get_int_or(js, "intent_deadline_ticks", where, 30);
        if (sp.intent_deadline_ticks < 1) fail(where, "intent_deadline_ticks must be >= 1");
        sp.limit_slack_bps = static_cast<int>(get_int_or(js, "limit_slack_bps", where, 15));
        if (sp.limit_slack_bps < 0 || sp.limit_slack_bps > 10000)
          fail(where, "limit_slack_bps out of [0,10000]");
        s.searchers.push_back(std::move(sp));
      }
    }
    if (ja.contains("takers")) {
      for (const auto& jt : ja.at("takers")) {
        std::string where = "agents.takers[" + std::to_string(s.takers.size()) + "]";
        check_keys(jt, {"id", "spread_bps", "max_offer_amount"}, where);
        TakerSpec t;
        t.id = static_cast<int>(get_int(jt, "id", where));
        t.spread_bps = static_cast<int>(get_int_or(jt, "spread_bps", where, 10));
        if (t.spread_bps < 0 || t.spread_bps > 10000) fail(where, "spread_bps out of [0,10000]");
        t.max_offer_amount = get_amount(jt, "max_offer_amount", where, 1);
        s.takers.push_back(std::move(t));
      }
    }
    if (ja.contains("lps")) {
      for (const auto& jl : ja.at("lps")) {
        std::string where = "agents.lps[" + std::to_string(s.lps.size()) + "]";
        check_keys(jl, {"id", "chain", "deposit"}, where);
        LpSpec l;
        l.id = static_cast<int>(get_int(jl, "id", where));
        l.chain = static_cast<ChainNum>(get_int(jl, "chain", where));
        l.deposit = get_amount(jl, "deposit", where, 1);
        s.lps.push_back(std::move(l));
      }
    }
  }

  // Cross-reference validation.
  std::set<ChainNum> chain_ids;
  for (const ChainConfig& c : s.chains)
    if (!chain_ids.insert(c.id).second) fail("chains", "duplicate chain id " + std::to_string(c.id));
  std::set<std::string> asset_syms;
  for (const AssetInfo& a : s.assets)
    if (!asset_syms.insert(a.symbol).second) fail("assets", "duplicate asset symbol " + a.symbol);
  for (const ChainConfig& c : s.chains)
    if (c.gas_per_tx > 0 && !asset_syms.count(c.gas_asset))
      fail("chains", "gas_asset '" + c.gas_asset + "' unknown on chain " + c.name);

  for (const AccountSpec& a : s.accounts) {
    if (!chain_ids.count(a.chain)) fail("accounts", a.owner + ": unknown chain");
    for (const auto& [sym, amt] : a.balances)
      if (!asset_syms.count(sym)) fail("accounts", a.owner + ": unknown asset " + sym);
  }

  std::set<BookId> book_ids;
  for (const BookSpec& b : s.books) {
    if (!book_ids.insert(b.id).second) fail("cex_books", "duplicate book id");
    if (!asset_syms.count(b.base)) fail("cex_books", "unknown base asset " + b.base);
    if (!asset_syms.count(b.quote)) fail("cex_books", "unknown quote asset " + b.quote);
  }
  std::set<PoolId> pool_ids;
  for (const PoolSpec& p : s.pools) {
    std::string where = "pools[" + std::to_string(p.id) + "]";
    if (!pool_ids.insert(p.id).second) fail("pools", "duplicate pool id");
    if (!chain_ids.count(p.chain)) fail(where, "unknown chain");
    if (!chain_ids.count(p.counter_chain)) fail(where, "unknown counter_chain");
    if (!asset_syms.count(p.asset_x)) fail(where, "unknown asset_x " + p.asset_x);
    if (!asset_syms.count(p.asset_y)) fail(where, "unknown asset_y " + p.asset_y);
    if (p.asset_x == p.asset_y) fail(where, "pool pair must differ");
    if (!book_ids.count(p.book)) fail(where, "unknown book");
    for (const BookSpec& b : s.books)
      if (b.id == p.book && (b.base != p.asset_x || b.quote != p.asset_y))
        fail(where, "book pair does not match the pool pair");
  }

  std::set<ValidatorId> validator_ids;
  for (const ValidatorSpec& v : s.validators)
    if (!validator_ids.insert(v.id).second) fail("validators", "duplicate validator id");

  std::set<ChainNum> mpc_chains;
  for (const MpcSpec& m : s.mpc_policies) {
    if (!chain_ids.count(m.chain)) fail("mpc_policies", "unknown chain");
    if (!mpc_chains.insert(m.chain).second) fail("mpc_policies", "duplicate policy for chain");
    std::set<std::string> signer_set(m.policy.signers.begin(), m.policy.signers.end());
    if (signer_set.size() != m.policy.signers.size()) fail("mpc_policies", "duplicate signer");
    for (const std::string& o : m.online)
      if (!signer_set.count(o)) fail("mpc_policies", "online signer '" + o + "' not in policy");
  }
  for (const ChainConfig& c : s.chains)
    if (c.no_smart_contracts && !mpc_chains.count(c.id))
      fail("chains", "chain '" + c.name + "' has no contracts and needs an mpc policy");

  if (s.vault.enabled) {
    if (!chain_ids.count(s.vault.chain)) fail("vault", "unknown chain");
    if (!asset_syms.count(s.vault.params.asset)) fail("vault", "unknown asset");
  }
  std::set<int> searcher_ids;
  for (const SearcherSpec& sp : s.searchers)
    if (!searcher_ids.insert(sp.id).second) fail("agents.searchers", "duplicate id");
  std::set<int> taker_ids;
  for (const TakerSpec& t : s.takers)
    if (!taker_ids.insert(t.id).second) fail("agents.takers", "duplicate id");
  std::set<int> lp_ids;
  for (const LpSpec& l : s.lps) {
    if (!lp_ids.insert(l.id).second) fail("agents.lps", "duplicate id");
    if (!chain_ids.count(l.chain)) fail("agents.lps", "unknown chain");
    if (!s.vault.enabled) fail("agents.lps", "lps configured but the vault is disabled");
  }
  for (const SearcherSpec& sp : s.searchers)
    if (sp.uses_vault && !s.vault.enabled)
      fail("agents.searchers", "uses_vault requires an enabled vault");

  return s;
}

}  // namespace

Result<Scenario> parse_scenario(const std::string& json_text) {
  try {
    return Result<Scenario>(parse_impl(json_text));
  } catch (const FieldError& e) {
    return Result<Scenario>(Err::InvalidScenario, e.message);
  } catch (const nlohmann::json::exception& e) {
    return Result<Scenario>(Err::InvalidScenario, std::string("parse error: ") + e.what());
  }
}

Result<Scenario> load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Result<Scenario>(Err::InvalidScenario, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  ordered_json root;
  root["schema_version"] = s.schema_version;
  root["seed"] = s.seed;
  root["horizon_ticks"] = s.horizon_ticks;
  root["mode"] = s.mode == RunMode::fluxlayer ? "fluxlayer" : "baseline";
  root["ticks_per_year"] = s.ticks_per_year;
  root["settlement_fee"] = s.settlement_fee;
  root["bridge_delay_ticks"] = s.bridge_delay_ticks;
  root["chains"] = ordered_json::array();
  for (const ChainConfig& c : s.chains)
    root["chains"].push_back({{"id", c.id},
                              {"name", c.name},
                              {"block_interval_ticks", c.block_interval_ticks},
                              {"native_finality_blocks", c.native_finality_blocks},
                              {"no_smart_contracts", c.no_smart_contracts},
                              {"gas_per_tx", c.gas_per_tx},
                              {"gas_asset", c.gas_asset}});
  root["assets"] = ordered_json::array();
  for (const AssetInfo& a : s.assets)
    root["assets"].push_back({{"symbol", a.symbol}, {"decimals", a.decimals}});
  root["accounts"] = ordered_json::array();
  for (const AccountSpec& a : s.accounts) {
    ordered_json balances;
    for (const auto& [sym, amt] : a.balances) balances[sym] = amt;
    root["accounts"].push_back({{"owner", a.owner}, {"chain", a.chain}, {"balances", balances}});
  }
  root["pools"] = ordered_json::array();
  for (const PoolSpec& p : s.pools)
    root["pools"].push_back({{"id", p.id},
                             {"chain", p.chain},
                             {"counter_chain", p.counter_chain},
                             {"asset_x", p.asset_x},
                             {"asset_y", p.asset_y},
                             {"reserve_x", p.reserve_x},
                             {"reserve_y", p.reserve_y},
                             {"fee_bps", p.fee_bps},
                             {"book", p.book}});
  root["cex_books"] = ordered_json::array();
  for (const BookSpec& b : s.books)
    root["cex_books"].push_back(
        {{"id", b.id},
         {"base", b.base},
         {"quote", b.quote},
         {"taker_fee_bps", b.taker_fee_bps},
         {"levels", b.levels},
         {"level_size", b.level_size},
         {"half_spread_bps", b.half_spread_bps},
         {"level_step_bps", b.level_step_bps},
         {"price",
          {{"initial", b.price.initial.to_decimal(9)},
           {"drift_bps_per_tick", b.price.drift_bps_per_tick},
           {"vol_bps_per_tick", b.price.vol_bps_per_tick},
           {"jump_prob", b.price.jump_prob},
           {"jump_size_bps", b.price.jump_size_bps},
           {"jump_revert_halflife_ticks", b.price.jump_revert_halflife_ticks}}}});
  root["validators"] = ordered_json::array();
  for (const ValidatorSpec& v : s.validators) {
    const char* behavior = v.behavior == ValidatorBehavior::honest    ? "honest"
                           : v.behavior == ValidatorBehavior::offline ? "offline"
                                                                      : "equivocate";
    root["validators"].push_back({{"id", v.id},
                                  {"restake", v.restake},
                                  {"behavior", behavior},
                                  {"vote_delay_ticks", v.vote_delay_ticks}});
  }
  root["quorum"] = {{"threshold_num", s.quorum.threshold_num},
                    {"threshold_den", s.quorum.threshold_den},
                    {"timeout_ticks", s.quorum.timeout_ticks},
                    {"slash_fraction_bps", s.quorum.slash_fraction_bps}};
  root["mpc_policies"] = ordered_json::array();
  for (const MpcSpec& m : s.mpc_policies)
    root["mpc_policies"].push_back({{"chain", m.chain},
                                    {"signers", m.policy.signers},
                                    {"threshold", m.policy.threshold},
                                    {"online", m.online}});
  root["vault"] = {{"enabled", s.vault.enabled},
                   {"asset", s.vault.params.asset.empty() ? "USDT" : s.vault.params.asset},
                   {"chain", s.vault.chain},
                   {"max_leverage", s.vault.params.max_leverage.to_decimal(9)},
                   {"maintenance_margin_bps", s.vault.params.maintenance_margin_bps},
                   {"interest_rate_bps_per_epoch", s.vault.params.interest_rate_bps_per_epoch},
                   {"epoch_ticks", s.vault.params.epoch_ticks},
                   {"profit_share_bps", s.vault.params.profit_share_bps}};
  ordered_json searchers = ordered_json::array();
  for (const SearcherSpec& sp : s.searchers)
    searchers.push_back({{"id", sp.id},
                         {"min_profit_threshold", sp.min_profit_threshold},
                         {"uses_vault", sp.uses_vault},
                         {"fill_policy", sp.fill_policy == FillPolicyKind::fragmentable
                                             ? "fragmentable"
                                             : "all_or_nothing"},
                         {"min_fragment_bps", sp.min_fragment_bps},
                         {"intent_deadline_ticks", sp.intent_deadline_ticks},
                         {"limit_slack_bps", sp.limit_slack_bps}});
  ordered_json takers = ordered_json::array();
  for (const TakerSpec& t : s.takers)
    takers.push_back(
        {{"id", t.id}, {"spread_bps", t.spread_bps}, {"max_offer_amount", t.max_offer_amount}});
  ordered_json lps = ordered_json::array();
  for (const LpSpec& l : s.lps)
    lps.push_back({{"id", l.id}, {"chain", l.chain}, {"deposit", l.deposit}});
  root["agents"] = {{"searchers", searchers}, {"takers", takers}, {"lps", lps}};
  return root.dump(2) + "\n";
}

}  // namespace flux
