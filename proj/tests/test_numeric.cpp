#include "doctest.h"

#include "flux/bigint.hpp"
#include "flux/rational.hpp"
#include "flux/rng.hpp"

using flux::BigInt;
using flux::Rational;

TEST_CASE("bigint basic arithmetic matches int128") {
  flux::Rng rng(7);
  for (int i = 0; i < 5000; ++i) {
    int64_t a = rng.next_range(-1'000'000'000'000'000, 1'000'000'000'000'000);
    int64_t b = rng.next_range(-1'000'000'000'000'000, 1'000'000'000'000'000);
    BigInt A(a), B(b);
    CHECK((A + B).to_i64().value() == a + b);
    CHECK((A - B).to_i64().value() == a - b);
    __int128 prod = static_cast<__int128>(a) * b;
    CHECK((A * B).to_string() ==
          (prod == 0 ? std::string("0") : [&] {
            __int128 p = prod;
            bool neg = p < 0;
            if (neg) p = -p;
            std::string s;
            while (p) {
              s.push_back(static_cast<char>('0' + static_cast<int>(p % 10)));
              p /= 10;
            }
            if (neg) s.push_back('-');
            std::reverse(s.begin(), s.end());
            return s;
          }()));
    if (b != 0) {
      BigInt q, r;
      BigInt::divmod(A, B, q, r);
      CHECK(q.to_i64().value() == a / b);
      CHECK(r.to_i64().value() == a % b);
      CHECK(q * B + r == A);
    }
  }
}

TEST_CASE("bigint multi-limb division identity") {
  flux::Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    // Build wide operands from several random limbs.
    auto wide = [&](int words) {
      BigInt v(0);
      for (int w = 0; w < words; ++w) v = v * BigInt::from_u64(1ull << 32) + BigInt::from_u64(rng.next_u64() & 0xffffffffull);
      return v;
    };
    BigInt a = wide(1 + static_cast<int>(rng.next_below(6)));
    BigInt b = wide(1 + static_cast<int>(rng.next_below(4)));
    if (b.is_zero()) continue;
    if (rng.next_bool(0.5)) a = -a;
    if (rng.next_bool(0.5)) b = -b;
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    CHECK(q * b + r == a);
    CHECK(r.abs() < b.abs());
    if (!r.is_zero()) CHECK(r.sign() == a.sign());
  }
}

TEST_CASE("bigint decimal round trip") {
  flux::Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    BigInt v = BigInt::from_u64(rng.next_u64());
    for (int k = 0; k < 3; ++k) v = v * BigInt::from_u64(rng.next_u64() | 1);
    if (rng.next_bool(0.5)) v = -v;
    auto parsed = BigInt::from_decimal(v.to_string());
    REQUIRE(parsed.has_value());
    CHECK(*parsed == v);
  }
  CHECK(BigInt::from_decimal("").has_value() == false);
  CHECK(BigInt::from_decimal("-").has_value() == false);
  CHECK(BigInt::from_decimal("12a").has_value() == false);
  CHECK(BigInt::from_decimal("-0")->is_zero());
}

TEST_CASE("bigint gcd") {
  CHECK(BigInt::gcd(BigInt(12), BigInt(18)) == BigInt(6));
  CHECK(BigInt::gcd(BigInt(-12), BigInt(18)) == BigInt(6));
  CHECK(BigInt::gcd(BigInt(0), BigInt(5)) == BigInt(5));
  BigInt big = BigInt::ten_pow(30);
  CHECK(BigInt::gcd(big * BigInt(7), big * BigInt(21)) == big * BigInt(7));
}

TEST_CASE("rational normalization and arithmetic") {
  Rational a = Rational::of(1, 3);
  Rational b = Rational::of(1, 6);
  CHECK(a + b == Rational::of(1, 2));
  CHECK(a - b == Rational::of(1, 6));
  CHECK(a * b == Rational::of(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(Rational::of(-4, 8) == Rational::of(1, -2));
  CHECK(Rational::of(2, 4).num() == BigInt(1));
  CHECK(Rational::of(2, 4).den() == BigInt(2));
}

TEST_CASE("rational floor and ceil") {
  CHECK(Rational::of(7, 2).floor() == BigInt(3));
  CHECK(Rational::of(7, 2).ceil() == BigInt(4));
  CHECK(Rational::of(-7, 2).floor() == BigInt(-4));
  CHECK(Rational::of(-7, 2).ceil() == BigInt(-3));
  CHECK(Rational(5).floor() == BigInt(5));
  CHECK(Rational(5).ceil() == BigInt(5));
}

TEST_CASE("rational decimal output is round-half-even at 9 digits") {
  CHECK(Rational::of(1, 2).to_decimal(0) == "0");   // 0.5 -> even 0
  CHECK(Rational::of(3, 2).to_decimal(0) == "2");   // 1.5 -> even 2
  CHECK(Rational::of(5, 2).to_decimal(0) == "2");   // 2.5 -> even 2
  CHECK(Rational::of(-1, 2).to_decimal(0) == "0");
  CHECK(Rational::of(-3, 2).to_decimal(0) == "-2");
  CHECK(Rational::of(1, 3).to_decimal() == "0.333333333");
  CHECK(Rational::of(2, 3).to_decimal() == "0.666666667");
  CHECK(Rational(1).to_decimal() == "1.000000000");
  // Tie at the ninth digit: 0.0000000005 -> 0.000000000 (even), 15e-10 -> 2e-9.
  CHECK(Rational::of(5, 10'000'000'000).to_decimal() == "0.000000000");
  CHECK(Rational::of(15, 10'000'000'000).to_decimal() == "0.000000002");
  CHECK(Rational::of(-15, 10'000'000'000).to_decimal() == "-0.000000002");
  CHECK(Rational::of(60000, 1).to_decimal() == "60000.000000000");
}

TEST_CASE("rational decimal parsing") {
  CHECK(Rational::from_decimal("0.5").value() == Rational::of(1, 2));
  CHECK(Rational::from_decimal("-4.25").value() == Rational::of(-17, 4));
  CHECK(Rational::from_decimal("60000").value() == Rational(60000));
  CHECK(Rational::from_decimal("0.000000001").value() == Rational::of(1, 1000000000));
  CHECK(!Rational::from_decimal("").has_value());
  CHECK(!Rational::from_decimal("1.").has_value());
  CHECK(!Rational::from_decimal("x").has_value());
}

TEST_CASE("rational compounding stays exact") {
  // (1 + 10/10000)^3 on 9000 base units.
  Rational factor(1);
  Rational step = Rational(1) + Rational::of(10, 10000);
  for (int i = 0; i < 3; ++i) factor *= step;
  Rational accrued = Rational(9000) * (factor - Rational(1));
  CHECK(accrued == Rational::of(9000LL * 3003001, 1000000000));
  CHECK(accrued.to_decimal() == "27.027009000");
}

TEST_CASE("rng determinism") {
  flux::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  flux::Rng c(43);
  CHECK(flux::Rng(42).next_u64() != c.next_u64());
}
