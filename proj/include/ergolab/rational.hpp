#pragma once
// Exact rational arithmetic over checked 128-bit integers. Used wherever an
// expectation, integral or conditional-expectation table can be kept exact.

#include "ergolab/int128.hpp"

namespace ergolab {

inline i128 gcd128(i128 a, i128 b) {
  u128 x = a < 0 ? u128(0) - u128(a) : u128(a);
  u128 y = b < 0 ? u128(0) - u128(b) : u128(b);
  while (y != 0) {
    u128 t = x % y;
    x = y;
    y = t;
  }
  return i128(x);
}

struct Rat {
  i128 num = 0;
  i128 den = 1;  // invariant: den > 0 and gcd(num, den) == 1

  Rat() = default;
  Rat(i128 n) : num(n), den(1) {}  // NOLINT: implicit from integers is intended
  Rat(long long n) : num(n), den(1) {}
  Rat(int n) : num(n), den(1) {}
  Rat(i128 n, i128 d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::runtime_error("rational with zero denominator");
    if (den < 0) {
      num = checked_neg(num);
      den = checked_neg(den);
    }
    if (num == 0) {
      den = 1;
      return;
    }
    i128 g = gcd128(num, den);
    num /= g;
    den /= g;
  }

  bool is_zero() const { return num == 0; }
  // plain double conversion; exact whenever num and den fit in 53 bits,
  // which covers every path that asserts exactness
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Rat operator+(const Rat& a, const Rat& b) {
  return Rat(checked_add(checked_mul(a.num, b.den), checked_mul(b.num, a.den)), checked_mul(a.den, b.den));
}
inline Rat operator-(const Rat& a, const Rat& b) {
  return Rat(checked_sub(checked_mul(a.num, b.den), checked_mul(b.num, a.den)), checked_mul(a.den, b.den));
}
inline Rat operator-(const Rat& a) { return Rat(checked_neg(a.num), a.den); }
inline Rat operator*(const Rat& a, const Rat& b) {
  return Rat(checked_mul(a.num, b.num), checked_mul(a.den, b.den));
}
inline Rat operator/(const Rat& a, const Rat& b) {
  if (b.num == 0) throw std::runtime_error("rational division by zero");
  return Rat(checked_mul(a.num, b.den), checked_mul(a.den, b.num));
}
inline Rat& operator+=(Rat& a, const Rat& b) { a = a + b; return a; }
inline Rat& operator-=(Rat& a, const Rat& b) { a = a - b; return a; }
inline Rat& operator*=(Rat& a, const Rat& b) { a = a * b; return a; }

inline bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
inline bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
inline bool operator<(const Rat& a, const Rat& b) {
  return checked_mul(a.num, b.den) < checked_mul(b.num, a.den);
}
inline bool operator<=(const Rat& a, const Rat& b) { return a == b || a < b; }
inline bool operator>(const Rat& a, const Rat& b) { return b < a; }
inline bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

inline Rat rat_abs(const Rat& a) { return a.num < 0 ? -a : a; }

inline std::string to_string(const Rat& a) {
  std::string s = to_string_i128(a.num);
  if (a.den != 1) s += "/" + to_string_i128(a.den);
  return s;
}

}  // namespace ergolab
