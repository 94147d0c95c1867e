#include "flux/rational.hpp"

#include <stdexcept>

namespace flux {

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("Rational with zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_.sign() < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  BigInt g = BigInt::gcd(num_, den_);
  if (g != BigInt(1)) {
    num_ = num_ / g;
    den_ = den_ / g;
  }
}

std::optional<Rational> Rational::from_decimal(std::string_view s) {
  if (s.empty()) return std::nullopt;
  size_t dot = s.find('.');
  if (dot == std::string_view::npos) {
    auto n = BigInt::from_decimal(s);
    if (!n) return std::nullopt;
    return Rational(*n, BigInt(1));
  }
  std::string_view ipart = s.substr(0, dot);
  std::string_view fpart = s.substr(dot + 1);
  if (fpart.empty() || fpart.size() > 64) return std::nullopt;
  bool neg = !ipart.empty() && ipart[0] == '-';
  if (ipart.empty() || ipart == "-" || ipart == "+") ipart = neg ? "-0" : "0";
  auto i = BigInt::from_decimal(ipart);
  auto f = BigInt::from_decimal(fpart);
  if (!i || !f || f->sign() < 0) return std::nullopt;
  BigInt scale = BigInt::ten_pow(static_cast<unsigned>(fpart.size()));
  BigInt num = i->abs() * scale + *f;
  if (neg) num = -num;
  return Rational(num, scale);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  // Cross-reduce so products of reduced values stay reduced cheaply.
  BigInt g1 = BigInt::gcd(a.num_, b.den_);
  BigInt g2 = BigInt::gcd(b.num_, a.den_);
  if (g1.is_zero()) g1 = BigInt(1);
  if (g2.is_zero()) g2 = BigInt(1);
  return Rational((a.num_ / g1) * (b.num_ / g2), (a.den_ / g2) * (b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("Rational division by zero");
  return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

int Rational::compare(const Rational& o) const {
  return (num_ * o.den_).compare(o.num_ * den_);
}

BigInt Rational::floor() const {
  BigInt q, r;
  BigInt::divmod(num_, den_, q, r);
  if (!r.is_zero() && num_.sign() < 0) q = q - BigInt(1);
  return q;
}

BigInt Rational::ceil() const {
  BigInt q, r;
  BigInt::divmod(num_, den_, q, r);
  if (!r.is_zero() && num_.sign() > 0) q = q + BigInt(1);
  return q;
}

std::string Rational::to_decimal(unsigned frac_digits) const {
  BigInt scale = BigInt::ten_pow(frac_digits);
  BigInt n = num_.abs() * scale;
  BigInt q, r;
  BigInt::divmod(n, den_, q, r);
  // Round half to even on the magnitude; ties are sign-symmetric.
  BigInt twice = r + r;
  int c = twice.compare(den_);
  if (c > 0 || (c == 0 && !(q % BigInt(2)).is_zero())) q = q + BigInt(1);

  std::string digits = q.to_string();
  if (digits.size() <= frac_digits) digits.insert(0, frac_digits + 1 - digits.size(), '0');
  std::string out;
  if (num_.sign() < 0 && !q.is_zero()) out.push_back('-');
  out.append(digits.begin(), digits.end() - frac_digits);
  if (frac_digits > 0) {
    out.push_back('.');
    out.append(digits.end() - frac_digits, digits.end());
  }
  return out;
}

double Rational::to_double() const { return num_.to_double() / den_.to_double(); }

Rational Rational::rounded(unsigned frac_digits) const {
  BigInt scale = BigInt::ten_pow(frac_digits);
  BigInt n = num_.abs() * scale;
  BigInt q, r;
  BigInt::divmod(n, den_, q, r);
  BigInt twice = r + r;
  int c = twice.compare(den_);
  if (c > 0 || (c == 0 && !(q % BigInt(2)).is_zero())) q = q + BigInt(1);
  if (num_.sign() < 0) q = -q;
  return Rational(std::move(q), std::move(scale));
}

}  // namespace flux
