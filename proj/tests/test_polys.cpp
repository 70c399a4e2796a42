#include <doctest.h>

#include <random>

#include "ergolab/polys.hpp"

using namespace ergolab;

TEST_CASE("evaluation fixtures") {
  CHECK(eval(IntPoly::of({0, 0, 1}), 5) == 25);
  CHECK(eval(IntPoly::of({0, 8, 3}), 0) == 0);
  // n^4 at 10^5 is 10^20, beyond 64 bits but comfortably inside 128
  CHECK(eval(IntPoly::of({0, 0, 0, 0, 1}), 100000) == parse_i128("100000000000000000000"));
  CHECK(eval(IntPoly::zero(), 12345) == 0);
}

TEST_CASE("evaluation overflows loudly instead of wrapping") {
  // (10^7)^6 = 10^42 exceeds the 128-bit range
  IntPoly p = IntPoly::of({0, 0, 0, 0, 0, 0, 1});
  CHECK_THROWS_AS(eval(p, 10'000'000), overflow_error);
}

TEST_CASE("Horner evaluation agrees with naive power summation") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coeff(-50, 50);
  std::uniform_int_distribution<int> deg(0, 6);
  std::uniform_int_distribution<long long> arg(-1000, 1000);
  for (int it = 0; it < 10000; ++it) {
    std::vector<i128> cs(std::size_t(deg(rng)) + 1);
    for (auto& c : cs) c = coeff(rng);
    IntPoly p(cs);  // trims trailing zeros
    const i128 n = arg(rng);
    i128 naive = 0, power = 1;
    for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
      naive += p.coeffs[k] * power;
      power *= n;
    }
    CHECK(eval(p, n) == naive);
  }
}

TEST_CASE("degree bookkeeping") {
  CHECK(IntPoly::of({1, 2, 0, 0}).degree() == 1);
  CHECK(IntPoly::of({7}).degree() == 0);
  CHECK(IntPoly::zero().degree() == 0);
  CHECK(IntPoly::zero().is_constant());
  CHECK(IntPoly::of({0, 0, 0}).is_zero());
}

TEST_CASE("orbit exponents") {
  PolynomialFamily fam(2, 2,
                       {IntPoly::of({0, 0, 3}), IntPoly::of({0, 0, 1}),
                        IntPoly::of({0, 0, 8}), IntPoly::of({0, 0, -1})});
  CHECK(orbit_exponent(fam, 0, 2) == GroupElement::of({12, 32}));
  CHECK(orbit_exponent(fam, 0, 0) == GroupElement::of({0, 0}));
  CHECK(orbit_exponent(fam, 1, 0) == GroupElement::of({0, 0}));

  PolynomialFamily inj(2, 2,
                       {IntPoly::of({0, 1}), IntPoly::zero(), IntPoly::zero(), IntPoly::of({0, 1})});
  CHECK(orbit_exponent(inj, 1, 7) == GroupElement::of({0, 7}));
  CHECK_THROWS(orbit_exponent(inj, 2, 1));
}

TEST_CASE("normalization subtracts constant terms and is idempotent") {
  PolynomialFamily fam(2, 1, {IntPoly::of({3, 0, 1}), IntPoly::of({0, 1})});
  NormalizeResult res = normalize_family(fam);
  CHECK(res.offsets[0] == GroupElement::of({3, 0}));
  CHECK(res.fam.at(0, 0) == IntPoly::of({0, 0, 1}));
  CHECK(res.fam.at(1, 0) == IntPoly::of({0, 1}));
  CHECK(is_normalized(res.fam));

  NormalizeResult twice = normalize_family(res.fam);
  CHECK(twice.fam.entries == res.fam.entries);
  CHECK(twice.offsets[0].is_zero());

  PolynomialFamily constants(2, 1, {IntPoly::of({5}), IntPoly::of({7})});
  NormalizeResult flat = normalize_family(constants);
  CHECK(flat.offsets[0] == GroupElement::of({5, 7}));
  CHECK(flat.fam.at(0, 0).is_zero());
  CHECK_FALSE(check_nondegeneracy(flat.fam).all_ok());
}

TEST_CASE("nondegeneracy checks") {
  PolynomialFamily good(2, 2,
                        {IntPoly::of({0, 0, 3}), IntPoly::of({0, 0, 1}),
                         IntPoly::of({0, 0, 8}), IntPoly::of({0, 0, -1})});
  CHECK(check_nondegeneracy(good).all_ok());

  PolynomialFamily dup(2, 2,
                       {IntPoly::of({0, 1}), IntPoly::of({0, 1}), IntPoly::zero(), IntPoly::zero()});
  NondegeneracyReport r = check_nondegeneracy(dup);
  CHECK(r.column_ok == std::vector<bool>{true, true});
  REQUIRE(r.bad_pairs.size() == 1);
  CHECK(r.bad_pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});

  PolynomialFamily zero(1, 1, {IntPoly::zero()});
  CHECK_FALSE(check_nondegeneracy(zero).column_ok[0]);
}

TEST_CASE("single-generator form restricts pair checks to shared generators") {
  // p_1 = n on T_1, p_2 = n on T_2: distinct generators, so no pair applies
  PolynomialFamily fam =
      PolynomialFamily::single_generator(2, {IntPoly::of({0, 1}), IntPoly::of({0, 1})}, {0, 1});
  CHECK(check_nondegeneracy(fam).all_ok());

  // same generator forces the difference check to fail
  PolynomialFamily clash =
      PolynomialFamily::single_generator(2, {IntPoly::of({0, 1}), IntPoly::of({0, 1})}, {0, 0});
  CHECK_FALSE(check_nondegeneracy(clash).all_ok());
}
