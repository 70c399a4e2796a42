#include "ergolab/polys.hpp"

#include <algorithm>

namespace ergolab {

bool operator==(const IntPoly& a, const IntPoly& b) { return a.coeffs == b.coeffs; }

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  std::vector<i128> c(std::max(a.coeffs.size(), b.coeffs.size()), 0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] = a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] = checked_add(c[i], b.coeffs[i]);
  return IntPoly(std::move(c));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
  std::vector<i128> c(std::max(a.coeffs.size(), b.coeffs.size()), 0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] = a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] = checked_sub(c[i], b.coeffs[i]);
  return IntPoly(std::move(c));
}

IntPoly scale(const IntPoly& p, i128 c) {
  std::vector<i128> out(p.coeffs.size());
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) out[i] = checked_mul(p.coeffs[i], c);
  return IntPoly(std::move(out));
}

std::string to_string(const IntPoly& p) {
  if (p.coeffs.empty()) return "0";
  std::string s;
  for (std::size_t k = p.coeffs.size(); k-- > 0;) {
    if (p.coeffs[k] == 0) continue;
    if (!s.empty()) s += " + ";
    s += to_string_i128(p.coeffs[k]);
    if (k >= 1) s += "*n";
    if (k >= 2) s += "^" + std::to_string(k);
  }
  return s.empty() ? "0" : s;
}

i128 eval(const IntPoly& p, i128 n) {
  try {
    i128 acc = 0;
    for (std::size_t k = p.coeffs.size(); k-- > 0;) {
      acc = checked_add(checked_mul(acc, n), p.coeffs[k]);
    }
    return acc;
  } catch (const overflow_error&) {
    throw overflow_error("evaluating " + to_string(p) + " at n = " + to_string_i128(n) +
                         " overflows 128 bits");
  }
}

PolynomialFamily::PolynomialFamily(std::size_t d_, std::size_t m_, std::vector<IntPoly> e)
    : d(d_), m(m_), entries(std::move(e)) {
  if (d == 0 || m == 0) throw std::runtime_error("polynomial family must have d >= 1 and m >= 1");
  if (entries.size() != d * m)
    throw std::runtime_error("polynomial family shape mismatch: expected " +
                             std::to_string(d * m) + " entries, got " +
                             std::to_string(entries.size()));
}

PolynomialFamily PolynomialFamily::single_generator(std::size_t d, std::vector<IntPoly> column_polys,
                                                    std::vector<std::size_t> gens) {
  const std::size_t m = column_polys.size();
  if (gens.size() != m) throw std::runtime_error("generator assignment length must equal m");
  std::vector<IntPoly> entries(d * m);
  for (std::size_t j = 0; j < m; ++j) {
    if (gens[j] >= d) throw std::runtime_error("generator index out of range");
    entries[gens[j] * m + j] = column_polys[j];
  }
  PolynomialFamily fam(d, m, std::move(entries));
  fam.generator_assignment = std::move(gens);
  return fam;
}

int PolynomialFamily::max_degree() const {
  int deg = 0;
  for (const auto& p : entries) deg = std::max(deg, p.degree());
  return deg;
}

GroupElement orbit_exponent(const PolynomialFamily& fam, std::size_t j, i128 n) {
  GroupElement out = GroupElement::zero(fam.d);
  orbit_exponent_into(fam, j, n, out);
  return out;
}

void orbit_exponent_into(const PolynomialFamily& fam, std::size_t j, i128 n, GroupElement& out) {
  if (j >= fam.m) throw std::runtime_error("column index out of range");
  out.coords.resize(fam.d);
  for (std::size_t i = 0; i < fam.d; ++i) out.coords[i] = eval(fam.at(i, j), n);
}

NormalizeResult normalize_family(const PolynomialFamily& fam) {
  NormalizeResult res;
  res.fam = fam;
  res.offsets.reserve(fam.m);
  for (std::size_t j = 0; j < fam.m; ++j) {
    GroupElement off = GroupElement::zero(fam.d);
    for (std::size_t i = 0; i < fam.d; ++i) {
      IntPoly& p = res.fam.at(i, j);
      off.coords[i] = p.constant_term();
      if (!p.coeffs.empty()) {
        p.coeffs[0] = 0;
        p.trim();
      }
    }
    res.offsets.push_back(std::move(off));
  }
  return res;
}

bool is_normalized(const PolynomialFamily& fam) {
  for (const auto& p : fam.entries)
    if (p.constant_term() != 0) return false;
  return true;
}

NondegeneracyReport check_nondegeneracy(const PolynomialFamily& fam) {
  NondegeneracyReport report;
  report.column_ok.resize(fam.m, false);
  for (std::size_t j = 0; j < fam.m; ++j) {
    bool nonconstant = false;
    for (std::size_t i = 0; i < fam.d; ++i)
      if (!fam.at(i, j).is_constant()) nonconstant = true;
    report.column_ok[j] = nonconstant;
  }
  for (std::size_t k = 0; k < fam.m; ++k) {
    for (std::size_t l = k + 1; l < fam.m; ++l) {
      if (fam.generator_assignment &&
          (*fam.generator_assignment)[k] != (*fam.generator_assignment)[l])
        continue;
      bool nonconstant = false;
      for (std::size_t i = 0; i < fam.d; ++i)
        if (!(fam.at(i, k) - fam.at(i, l)).is_constant()) nonconstant = true;
      if (!nonconstant) report.bad_pairs.emplace_back(k, l);
    }
  }
  return report;
}

}  // namespace ergolab
