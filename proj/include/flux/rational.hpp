#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "flux/bigint.hpp"

namespace flux {

// Exact rational. Always normalized: gcd(num, den) == 1, den > 0, zero is 0/1.
// Prices, share accounting and oracle references run on this; ledger amounts
// stay integral.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(int64_t v) : num_(v), den_(1) {}
  Rational(BigInt num, BigInt den);
  static Rational of(int64_t num, int64_t den) { return Rational(BigInt(num), BigInt(den)); }
  // Parses "123", "-4.5", "0.000000001". nullopt on garbage.
  static std::optional<Rational> from_decimal(std::string_view s);

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  int sign() const { return num_.sign(); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  int compare(const Rational& o) const;
  bool operator==(const Rational& o) const { return compare(o) == 0; }
  bool operator!=(const Rational& o) const { return compare(o) != 0; }
  bool operator<(const Rational& o) const { return compare(o) < 0; }
  bool operator<=(const Rational& o) const { return compare(o) <= 0; }
  bool operator>(const Rational& o) const { return compare(o) > 0; }
  bool operator>=(const Rational& o) const { return compare(o) >= 0; }

  BigInt floor() const;
  BigInt ceil() const;

  // Fixed-point decimal with `frac_digits` fractional digits, round half to
  // even. The output always carries exactly frac_digits digits after '.'.
  std::string to_decimal(unsigned frac_digits = 9) const;
  double to_double() const;

  // Nearest value on the 10^-frac_digits grid, round half to even. Keeps
  // derived prices on small denominators.
  Rational rounded(unsigned frac_digits) const;

 private:
  BigInt num_;
  BigInt den_;
  void normalize();
};

}  // namespace flux
