#pragma once
// Checked 128-bit integer arithmetic. All group exponents and polynomial
// values live in this range; overflow raises instead of wrapping.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ergolab {

using i128 = __int128;
using u128 = unsigned __int128;

struct overflow_error : std::runtime_error {
  explicit overflow_error(const std::string& what) : std::runtime_error(what) {}
};

inline i128 checked_add(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw overflow_error("int128 addition overflow");
  return r;
}

inline i128 checked_sub(i128 a, i128 b) {
  i128 r;
  if (__builtin_sub_overflow(a, b, &r)) throw overflow_error("int128 subtraction overflow");
  return r;
}

inline i128 checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw overflow_error("int128 multiplication overflow");
  return r;
}

inline i128 checked_neg(i128 a) { return checked_sub(i128{0}, a); }

inline i128 abs128(i128 a) { return a < 0 ? checked_neg(a) : a; }

std::string to_string_i128(i128 v);
i128 parse_i128(const std::string& s);

inline double to_double(i128 v) { return static_cast<double>(v); }

}  // namespace ergolab
