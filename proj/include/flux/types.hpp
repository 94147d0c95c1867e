#pragma once

#include <cstdint>
#include <string>

namespace flux {

// Token quantity in base units of the asset's `decimals`. Ledger state is
// never negative; signed to make deltas and PnL arithmetic natural.
using Amount = int64_t;

// Global simulation tick. All chains share one clock and differ only in
// blocks-per-tick and finality depth.
using Tick = int64_t;

using ChainNum = int32_t;
using IntentId = int64_t;
using SettlementId = int64_t;
using PositionId = int64_t;
using ValidatorId = int32_t;
using PoolId = int32_t;
using BookId = int32_t;

// Largest amount accepted anywhere. Keeps every venue formula inside
// unsigned __int128: reserve * amount * 10^4 <= 1e38.
inline constexpr Amount kMaxAmount = 100'000'000'000'000'000;  // 1e17

struct AccountKey {
  std::string owner;
  ChainNum chain = 0;

  bool operator<(const AccountKey& o) const {
    if (chain != o.chain) return chain < o.chain;
    return owner < o.owner;
  }
  bool operator==(const AccountKey& o) const { return chain == o.chain && owner == o.owner; }
};

}  // namespace flux
