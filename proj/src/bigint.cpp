#include "flux/bigint.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace flux {

namespace {
constexpr uint64_t kBase = 1ull << 32;
}

BigInt::BigInt(int64_t v) {
  neg_ = v < 0;
  uint64_t mag = neg_ ? (~static_cast<uint64_t>(v) + 1) : static_cast<uint64_t>(v);
  while (mag) {
    limbs_.push_back(static_cast<uint32_t>(mag & 0xffffffffu));
    mag >>= 32;
  }
  if (limbs_.empty()) neg_ = false;
}

BigInt BigInt::from_u64(uint64_t v) {
  BigInt r;
  while (v) {
    r.limbs_.push_back(static_cast<uint32_t>(v & 0xffffffffu));
    v >>= 32;
  }
  return r;
}

BigInt BigInt::from_u128(unsigned __int128 v) {
  BigInt r;
  while (v) {
    r.limbs_.push_back(static_cast<uint32_t>(v & 0xffffffffu));
    v >>= 32;
  }
  return r;
}

BigInt BigInt::from_i128(__int128 v) {
  if (v >= 0) return from_u128(static_cast<unsigned __int128>(v));
  BigInt r = from_u128(~static_cast<unsigned __int128>(v) + 1);
  r.neg_ = !r.limbs_.empty();
  return r;
}

std::optional<BigInt> BigInt::from_decimal(std::string_view s) {
  if (s.empty()) return std::nullopt;
  bool neg = false;
  size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) return std::nullopt;
  BigInt r;
  const BigInt ten(10);
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return std::nullopt;
    r = r * ten + BigInt(c - '0');
  }
  if (neg && !r.is_zero()) r.neg_ = true;
  return r;
}

BigInt BigInt::ten_pow(unsigned n) {
  BigInt r(1);
  const BigInt ten(10);
  for (unsigned i = 0; i < n; ++i) r = r * ten;
  return r;
}

void BigInt::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  if (limbs_.empty()) neg_ = false;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  const auto& big = a.size() >= b.size() ? a : b;
  const auto& small = a.size() >= b.size() ? b : a;
  std::vector<uint32_t> out(big.size() + 1, 0);
  uint64_t carry = 0;
  for (size_t i = 0; i < big.size(); ++i) {
    uint64_t s = carry + big[i] + (i < small.size() ? small[i] : 0);
    out[i] = static_cast<uint32_t>(s & 0xffffffffu);
    carry = s >> 32;
  }
  out[big.size()] = static_cast<uint32_t>(carry);
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  assert(cmp_mag(a, b) >= 0);
  std::vector<uint32_t> out(a.size(), 0);
  int64_t borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t d = static_cast<int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
    if (d < 0) {
      d += static_cast<int64_t>(kBase);
      borrow = 1;
    } else {
      borrow = 0;
    }
    out[i] = static_cast<uint32_t>(d);
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

std::vector<uint32_t> BigInt::mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<uint32_t> out(a.size() + b.size(), 0);
  for (size_t i = 0; i < a.size(); ++i) {
    uint64_t carry = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      uint64_t cur = out[i + j] + static_cast<uint64_t>(a[i]) * b[j] + carry;
      out[i + j] = static_cast<uint32_t>(cur & 0xffffffffu);
      carry = cur >> 32;
    }
    size_t k = i + b.size();
    while (carry) {
      uint64_t cur = out[k] + carry;
      out[k] = static_cast<uint32_t>(cur & 0xffffffffu);
      carry = cur >> 32;
      ++k;
    }
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

// Knuth algorithm D on uint32 limbs.
void BigInt::divmod_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                        std::vector<uint32_t>& q, std::vector<uint32_t>& r) {
  assert(!b.empty());
  q.clear();
  r.clear();
  if (cmp_mag(a, b) < 0) {
    r = a;
    return;
  }
  if (b.size() == 1) {
    uint64_t d = b[0];
    q.assign(a.size(), 0);
    uint64_t rem = 0;
    for (size_t i = a.size(); i-- > 0;) {
      uint64_t cur = (rem << 32) | a[i];
      q[i] = static_cast<uint32_t>(cur / d);
      rem = cur % d;
    }
    while (!q.empty() && q.back() == 0) q.pop_back();
    if (rem) r.push_back(static_cast<uint32_t>(rem));
    return;
  }

  // Normalize so the divisor's top limb has its high bit set.
  int shift = 0;
  for (uint32_t top = b.back(); !(top & 0x80000000u); top <<= 1) ++shift;
  const size_t n = b.size();
  const size_t m = a.size() - n;

  auto shl = [](const std::vector<uint32_t>& v, int s, size_t extra) {
    std::vector<uint32_t> out(v.size() + extra, 0);
    if (s == 0) {
      std::copy(v.begin(), v.end(), out.begin());
      return out;
    }
    uint32_t carry = 0;
    for (size_t i = 0; i < v.size(); ++i) {
      out[i] = (v[i] << s) | carry;
      carry = static_cast<uint32_t>(static_cast<uint64_t>(v[i]) >> (32 - s));
    }
    // The divisor is shifted by its own leading-zero count, so its carry is
    // zero by construction; only the dividend gets an extra limb.
    if (extra > 0) out[v.size()] = carry;
    return out;
  };

  std::vector<uint32_t> u = shl(a, shift, 1);
  std::vector<uint32_t> v = shl(b, shift, 0);
  while (v.size() > n) v.pop_back();  // shift of normalized divisor never overflows
  if (u.size() < a.size() + 1) u.resize(a.size() + 1, 0);

  q.assign(m + 1, 0);
  const uint64_t vtop = v[n - 1];
  const uint64_t vsecond = v[n - 2];

  for (size_t j = m + 1; j-- > 0;) {
    uint64_t numerator = (static_cast<uint64_t>(u[j + n]) << 32) | u[j + n - 1];
    uint64_t qhat = numerator / vtop;
    uint64_t rhat = numerator % vtop;
    while (qhat >= kBase || qhat * vsecond > ((rhat << 32) | u[j + n - 2])) {
      --qhat;
      rhat += vtop;
      if (rhat >= kBase) break;
    }
    // Multiply-subtract qhat * v from u[j .. j+n].
    int64_t borrow = 0;
    uint64_t carry = 0;
    for (size_t i = 0; i < n; ++i) {
      uint64_t p = qhat * v[i] + carry;
      carry = p >> 32;
      int64_t t = static_cast<int64_t>(u[i + j]) - static_cast<int64_t>(p & 0xffffffffu) - borrow;
      if (t < 0) {
        t += static_cast<int64_t>(kBase);
        borrow = 1;
      } else {
        borrow = 0;
      }
      u[i + j] = static_cast<uint32_t>(t);
    }
    int64_t t = static_cast<int64_t>(u[j + n]) - static_cast<int64_t>(carry) - borrow;
    if (t < 0) {
      // qhat was one too large; add v back.
      t += static_cast<int64_t>(kBase);
      --qhat;
      uint64_t c2 = 0;
      for (size_t i = 0; i < n; ++i) {
        uint64_t s = static_cast<uint64_t>(u[i + j]) + v[i] + c2;
        u[i + j] = static_cast<uint32_t>(s & 0xffffffffu);
        c2 = s >> 32;
      }
      t += static_cast<int64_t>(c2);
      t &= static_cast<int64_t>(kBase) - 1;
    }
    u[j + n] = static_cast<uint32_t>(t);
    q[j] = static_cast<uint32_t>(qhat);
  }

  while (!q.empty() && q.back() == 0) q.pop_back();
  // Denormalize remainder.
  r.assign(u.begin(), u.begin() + n);
  if (shift) {
    uint32_t carry = 0;
    for (size_t i = r.size(); i-- > 0;) {
      uint32_t cur = r[i];
      r[i] = (cur >> shift) | carry;
      carry = cur << (32 - shift);
    }
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
}

BigInt BigInt::operator-() const {
  BigInt r = *this;
  if (!r.is_zero()) r.neg_ = !r.neg_;
  return r;
}

BigInt BigInt::abs() const {
  BigInt r = *this;
  r.neg_ = false;
  return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
  BigInt r;
  if (a.neg_ == b.neg_) {
    r.limbs_ = BigInt::add_mag(a.limbs_, b.limbs_);
    r.neg_ = a.neg_;
  } else {
    int c = BigInt::cmp_mag(a.limbs_, b.limbs_);
    if (c == 0) return BigInt();
    if (c > 0) {
      r.limbs_ = BigInt::sub_mag(a.limbs_, b.limbs_);
      r.neg_ = a.neg_;
    } else {
      r.limbs_ = BigInt::sub_mag(b.limbs_, a.limbs_);
      r.neg_ = b.neg_;
    }
  }
  r.trim();
  return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
  BigInt r;
  r.limbs_ = BigInt::mul_mag(a.limbs_, b.limbs_);
  r.neg_ = !r.limbs_.empty() && (a.neg_ != b.neg_);
  return r;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  if (b.is_zero()) throw std::domain_error("BigInt division by zero");
  std::vector<uint32_t> qm, rm;
  divmod_mag(a.limbs_, b.limbs_, qm, rm);
  q.limbs_ = std::move(qm);
  q.neg_ = !q.limbs_.empty() && (a.neg_ != b.neg_);
  r.limbs_ = std::move(rm);
  r.neg_ = !r.limbs_.empty() && a.neg_;
}

BigInt operator/(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return r;
}

int BigInt::compare(const BigInt& o) const {
  if (neg_ != o.neg_) return neg_ ? -1 : 1;
  int c = cmp_mag(limbs_, o.limbs_);
  return neg_ ? -c : c;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
  a.neg_ = false;
  b.neg_ = false;
  while (!b.is_zero()) {
    BigInt q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

std::string BigInt::to_string() const {
  if (is_zero()) return "0";
  std::vector<uint32_t> cur = limbs_;
  std::string digits;
  while (!cur.empty()) {
    // Divide magnitude by 1e9, collect remainder.
    uint64_t rem = 0;
    for (size_t i = cur.size(); i-- > 0;) {
      uint64_t x = (rem << 32) | cur[i];
      cur[i] = static_cast<uint32_t>(x / 1000000000ull);
      rem = x % 1000000000ull;
    }
    while (!cur.empty() && cur.back() == 0) cur.pop_back();
    for (int i = 0; i < 9; ++i) {
      digits.push_back(static_cast<char>('0' + rem % 10));
      rem /= 10;
    }
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  if (neg_) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

std::optional<int64_t> BigInt::to_i64() const {
  if (limbs_.size() > 2) return std::nullopt;
  uint64_t mag = 0;
  if (limbs_.size() >= 1) mag = limbs_[0];
  if (limbs_.size() == 2) mag |= static_cast<uint64_t>(limbs_[1]) << 32;
  if (neg_) {
    if (mag > 0x8000000000000000ull) return std::nullopt;
    return -static_cast<int64_t>(mag - 1) - 1;
  }
  if (mag > static_cast<uint64_t>(INT64_MAX)) return std::nullopt;
  return static_cast<int64_t>(mag);
}

double BigInt::to_double() const {
  double r = 0;
  for (size_t i = limbs_.size(); i-- > 0;) r = r * 4294967296.0 + limbs_[i];
  return neg_ ? -r : r;
}

}  // namespace flux
