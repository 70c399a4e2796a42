#pragma once
// Z^d group elements and the weighted algebraic past.
//
// Given strictly positive weights (A_1,...,A_d), the past Phi consists of all
// g != 0 whose first nonzero partial sum t_k(g) = sum_{l<=d-k} A_l g_l,
// scanned for k = 0,1,...,d-1, is strictly negative. Phi induces the
// left-invariant total order  g1 <_Phi g2  iff  g1 - g2 in Phi.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/int128.hpp"

namespace ergolab {

struct GroupElement {
  std::vector<i128> coords;

  GroupElement() = default;
  explicit GroupElement(std::vector<i128> c) : coords(std::move(c)) {}
  static GroupElement zero(std::size_t d) { return GroupElement(std::vector<i128>(d, 0)); }
  static GroupElement of(std::initializer_list<long long> vals) {
    std::vector<i128> c;
    for (long long v : vals) c.push_back(v);
    return GroupElement(std::move(c));
  }

  std::size_t dim() const { return coords.size(); }
  bool is_zero() const {
    for (i128 c : coords)
      if (c != 0) return false;
    return true;
  }
};

struct dimension_mismatch : std::runtime_error {
  explicit dimension_mismatch(const std::string& what) : std::runtime_error(what) {}
};

GroupElement operator+(const GroupElement& a, const GroupElement& b);
GroupElement operator-(const GroupElement& a, const GroupElement& b);
GroupElement operator-(const GroupElement& a);
bool operator==(const GroupElement& a, const GroupElement& b);
inline bool operator!=(const GroupElement& a, const GroupElement& b) { return !(a == b); }
std::string to_string(const GroupElement& g);

// adds b into a without reallocating; same checked arithmetic as operator+
void add_in_place(GroupElement& a, const GroupElement& b);

struct PastWeights {
  std::vector<std::int64_t> weights;  // every entry >= 1

  PastWeights() = default;
  explicit PastWeights(std::vector<std::int64_t> w);
  static PastWeights of(std::initializer_list<std::int64_t> vals) {
    return PastWeights(std::vector<std::int64_t>(vals));
  }
  std::size_t dim() const { return weights.size(); }
};

enum class OrderOutcome { Less, Equal, Greater };

// g in Phi: the first nonzero partial sum (full sum first, then dropping
// trailing coordinates one at a time) is strictly negative.
bool phi_contains(const PastWeights& w, const GroupElement& g);

OrderOutcome phi_compare(const PastWeights& w, const GroupElement& g1, const GroupElement& g2);

inline bool phi_less(const PastWeights& w, const GroupElement& g1, const GroupElement& g2) {
  return phi_compare(w, g1, g2) == OrderOutcome::Less;
}
inline bool phi_leq(const PastWeights& w, const GroupElement& g1, const GroupElement& g2) {
  return phi_compare(w, g1, g2) != OrderOutcome::Greater;
}

struct AxiomCounterexample {
  int axiom = 0;  // 1 = disjointness, 2 = cover, 3 = closure under addition
  GroupElement g, h;
};

struct AxiomReport {
  bool all_pass = false;
  std::uint64_t checked_disjoint = 0;
  std::uint64_t checked_cover = 0;
  std::uint64_t checked_product = 0;
  std::uint64_t phi_count = 0;  // |Phi ∩ box|
  std::optional<AxiomCounterexample> counterexample;
};

// Exhaustive check of the three past axioms on the box [-r, r]^d:
// (1) no g != 0 lies in both Phi and -Phi, (2) every g != 0 lies in one of
// them, (3) g, h in Phi with g + h in the box implies g + h in Phi.
// Requires (2r+1)^d <= 3*10^7 so the box enumerates in memory.
AxiomReport verify_past_axioms(const PastWeights& w, int box_radius);

}  // namespace ergolab
