#pragma once

#include <cassert>
#include <string>
#include <string_view>
#include <variant>

namespace flux {

enum class Err {
  // ledger
  InsufficientBalance,
  UnknownAccount,
  UnknownAsset,
  UnknownChain,
  ZeroAmount,
  Overflow,
  // markets
  InsufficientDepth,
  InsufficientTraderBalance,
  // intent
  InsufficientFunds,
  DeadlineInPast,
  PriceBelowLimit,
  FragmentTooSmall,
  IntentClosed,
  UnknownIntent,
  // settlement
  InsufficientTakerFunds,
  AlreadyLocked,
  AlreadyVoted,
  ValidatorSlashed,
  UnknownValidator,
  RecordNotLocked,
  NotTimedOut,
  AlreadyFinalized,
  UnknownSigner,
  UnknownRecord,
  // vault
  LeverageExceeded,
  InsufficientVaultLiquidity,
  InsufficientShares,
  VaultIlliquid,
  VaultInsolvent,
  Shortfall,
  PositionHealthy,
  PositionClosed,
  UnknownPosition,
  // scenario / cli
  InvalidScenario,
};

std::string_view err_name(Err e);

struct Error {
  Err code;
  std::string detail;
};

template <typename T>
class Result {
 public:
  Result(T v) : v_(std::move(v)) {}
  Result(Error e) : v_(std::move(e)) {}
  Result(Err code, std::string detail = {}) : v_(Error{code, std::move(detail)}) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const {
    assert(ok());
    return std::get<T>(v_);
  }
  T& value() {
    assert(ok());
    return std::get<T>(v_);
  }
  const Error& error() const {
    assert(!ok());
    return std::get<Error>(v_);
  }
  Err code() const { return error().code; }

 private:
  std::variant<T, Error> v_;
};

// For operations whose success carries no payload.
using Status = Result<std::monostate>;
inline Status ok_status() { return Status(std::monostate{}); }

}  // namespace flux
