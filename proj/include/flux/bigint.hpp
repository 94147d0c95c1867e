#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flux {

// Arbitrary-precision signed integer, sign-magnitude over base-2^32 limbs.
// Magnitudes in this project stay small (hundreds of bits); schoolbook
// arithmetic is deliberate.
class BigInt {
 public:
  BigInt() = default;
  BigInt(int64_t v);

  static BigInt from_u64(uint64_t v);
  static BigInt from_u128(unsigned __int128 v);
  static BigInt from_i128(__int128 v);
  // Accepts optional leading '-', digits only. Empty/garbage -> nullopt.
  static std::optional<BigInt> from_decimal(std::string_view s);
  static BigInt ten_pow(unsigned n);

  bool is_zero() const { return limbs_.empty(); }
  bool negative() const { return neg_; }
  int sign() const { return limbs_.empty() ? 0 : (neg_ ? -1 : 1); }

  BigInt operator-() const;
  BigInt abs() const;

  friend BigInt operator+(const BigInt& a, const BigInt& b);
  friend BigInt operator-(const BigInt& a, const BigInt& b);
  friend BigInt operator*(const BigInt& a, const BigInt& b);
  // Truncated division (C semantics): q rounds toward zero, r has a's sign.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
  friend BigInt operator/(const BigInt& a, const BigInt& b);
  friend BigInt operator%(const BigInt& a, const BigInt& b);

  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  // -1 / 0 / +1 as *this <=> o.
  int compare(const BigInt& o) const;
  bool operator==(const BigInt& o) const { return compare(o) == 0; }
  bool operator!=(const BigInt& o) const { return compare(o) != 0; }
  bool operator<(const BigInt& o) const { return compare(o) < 0; }
  bool operator<=(const BigInt& o) const { return compare(o) <= 0; }
  bool operator>(const BigInt& o) const { return compare(o) > 0; }
  bool operator>=(const BigInt& o) const { return compare(o) >= 0; }

  static BigInt gcd(BigInt a, BigInt b);

  std::string to_string() const;
  // nullopt when out of int64 range.
  std::optional<int64_t> to_i64() const;
  double to_double() const;

  size_t limb_count() const { return limbs_.size(); }

 private:
  std::vector<uint32_t> limbs_;  // little-endian, no trailing zero limbs
  bool neg_ = false;             // never true for zero

  void trim();
  static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  // Requires |a| >= |b|.
  static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  static std::vector<uint32_t> mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  static void divmod_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                         std::vector<uint32_t>& q, std::vector<uint32_t>& r);
};

}  // namespace flux
