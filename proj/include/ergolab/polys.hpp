#pragma once
// Exact integer polynomials and the d x m family that drives the averages:
// column j of the family is the exponent vector (p_{1,j}(n), ..., p_{d,j}(n)).

#include <optional>
#include <vector>

#include "ergolab/lattice.hpp"

namespace ergolab {

struct IntPoly {
  // coeffs[k] multiplies n^k; trailing zeros are trimmed on construction.
  std::vector<i128> coeffs;

  IntPoly() = default;
  explicit IntPoly(std::vector<i128> c) : coeffs(std::move(c)) { trim(); }
  static IntPoly of(std::initializer_list<long long> c) {
    std::vector<i128> v;
    for (long long x : c) v.push_back(x);
    return IntPoly(std::move(v));
  }
  static IntPoly zero() { return IntPoly(); }

  void trim() {
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  }
  // degree of the zero polynomial is 0 (it is a constant)
  int degree() const { return coeffs.empty() ? 0 : int(coeffs.size()) - 1; }
  bool is_constant() const { return degree() == 0; }
  bool is_zero() const { return coeffs.empty(); }
  i128 constant_term() const { return coeffs.empty() ? i128(0) : coeffs[0]; }
  i128 leading_coeff() const { return coeffs.empty() ? i128(0) : coeffs.back(); }
};

bool operator==(const IntPoly& a, const IntPoly& b);
IntPoly operator+(const IntPoly& a, const IntPoly& b);
IntPoly operator-(const IntPoly& a, const IntPoly& b);
IntPoly scale(const IntPoly& p, i128 c);
std::string to_string(const IntPoly& p);

// Horner evaluation in checked 128-bit arithmetic.
i128 eval(const IntPoly& p, i128 n);

struct PolynomialFamily {
  std::size_t d = 0;  // acting dimension (rows)
  std::size_t m = 0;  // number of observables (columns)
  std::vector<IntPoly> entries;  // row-major, entries[i * m + j] = p_{i,j}
  // single-generator form: column j has its polynomial in row generator[j]
  // (0-based) and zeros elsewhere
  std::optional<std::vector<std::size_t>> generator_assignment;

  PolynomialFamily() = default;
  PolynomialFamily(std::size_t d_, std::size_t m_, std::vector<IntPoly> e);
  // builds the single-generator form of column polynomials q_j placed in
  // row gens[j]
  static PolynomialFamily single_generator(std::size_t d, std::vector<IntPoly> column_polys,
                                           std::vector<std::size_t> gens);

  const IntPoly& at(std::size_t i, std::size_t j) const { return entries[i * m + j]; }
  IntPoly& at(std::size_t i, std::size_t j) { return entries[i * m + j]; }
  int max_degree() const;
};

// (p_{1,j}(n), ..., p_{d,j}(n)) for 0-based column j
GroupElement orbit_exponent(const PolynomialFamily& fam, std::size_t j, i128 n);
// same, writing into a preallocated element (hot path of the engines)
void orbit_exponent_into(const PolynomialFamily& fam, std::size_t j, i128 n, GroupElement& out);

struct NormalizeResult {
  PolynomialFamily fam;                 // constant terms removed
  std::vector<GroupElement> offsets;    // offsets[j] = (p_{1,j}(0), ..., p_{d,j}(0))
};
NormalizeResult normalize_family(const PolynomialFamily& fam);
bool is_normalized(const PolynomialFamily& fam);

struct NondegeneracyReport {
  std::vector<bool> column_ok;  // column's vector polynomial is nonconstant
  // pairs (k, l), k < l, whose difference vector polynomial is constant;
  // in single-generator form only pairs sharing a generator are examined
  std::vector<std::pair<std::size_t, std::size_t>> bad_pairs;

  bool all_ok() const {
    for (bool b : column_ok)
      if (!b) return false;
    return bad_pairs.empty();
  }
};
NondegeneracyReport check_nondegeneracy(const PolynomialFamily& fam);

}  // namespace ergolab
