#pragma once
// Automatic choice of past weights for a polynomial family.
//
// Candidates are geometric, A = (1, B, B^2, ..., B^{d-1}) for B = 1, 2, 3, ...
// Each requirement (weighted column sums nonconstant, weighted pairwise
// differences nonconstant) rules out only the finitely many B that are roots
// of a nonzero coefficient polynomial, so the search terminates.

#include <cstdint>
#include <optional>
#include <vector>

#include "ergolab/polys.hpp"

namespace ergolab {

struct degenerate_family_error : std::runtime_error {
  explicit degenerate_family_error(const std::string& what) : std::runtime_error(what) {}
};

struct WeightSelection {
  PastWeights weights;
  std::int64_t candidate_base = 0;  // the accepted B
  std::uint64_t n0 = 0;             // column degree condition active past n0
  std::uint64_t n1 = 0;             // pair degree condition active past n1
  std::uint64_t n2 = 0;             // columns strictly <_Phi-decreasing past n2
  // column_order[0] is the eventually <_Phi-largest column (0-based indices
  // into the input family); the order realizes the strict decrease in j
  std::vector<std::size_t> column_order;
};

WeightSelection select_weights(const PolynomialFamily& fam);

// weighted column sum  sum_i A_i p_{i,j}
IntPoly weighted_column_sum(const PolynomialFamily& fam, const PastWeights& w, std::size_t j);

// Least N such that for all n > N the orbit exponents, in the family's given
// column order, are strictly <_Phi-decreasing in j. Empty when the given
// order fails asymptotically (or a weighted pair difference is constant).
std::optional<std::uint64_t> column_order_threshold(const PolynomialFamily& fam,
                                                    const PastWeights& w);

}  // namespace ergolab
