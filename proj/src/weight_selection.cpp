#include "ergolab/weight_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ergolab {

IntPoly weighted_column_sum(const PolynomialFamily& fam, const PastWeights& w, std::size_t j) {
  IntPoly acc;
  for (std::size_t i = 0; i < fam.d; ++i) acc = acc + scale(fam.at(i, j), i128(w.weights[i]));
  return acc;
}

// least n beyond every real root: 1 + max_r |c_r / c_deg| (Cauchy bound)
static std::uint64_t root_bound(const IntPoly& p) {
  if (p.is_constant()) return 0;
  const double lead = std::fabs(static_cast<double>(p.leading_coeff()));
  double best = 0;
  for (std::size_t r = 0; r + 1 < p.coeffs.size(); ++r) {
    double c = std::fabs(static_cast<double>(p.coeffs[r]));
    best = std::max(best, c / lead);
  }
  // slack absorbs the rounding of the 128-bit coefficients into doubles
  double bound = 2.0 + best * (1.0 + 1e-9);
  if (bound > 1e6) throw std::runtime_error("root bound too large for threshold scan");
  return static_cast<std::uint64_t>(std::ceil(bound));
}

// true when a(n) > b(n) for all sufficiently large n
static bool eventually_greater(const IntPoly& a, const IntPoly& b) {
  IntPoly diff = a - b;
  return !diff.is_zero() && diff.leading_coeff() > 0;
}

static std::uint64_t scan_order_violations(const PolynomialFamily& fam, const PastWeights& w,
                                           const std::vector<std::size_t>& order,
                                           std::uint64_t scan_to) {
  std::uint64_t last_violation = 0;
  for (std::uint64_t n = 1; n <= scan_to; ++n) {
    for (std::size_t a = 0; a + 1 < order.size(); ++a) {
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        GroupElement ga = orbit_exponent(fam, order[a], i128(n));
        GroupElement gb = orbit_exponent(fam, order[b], i128(n));
        if (phi_compare(w, gb, ga) != OrderOutcome::Less) last_violation = std::max(last_violation, n);
      }
    }
  }
  return last_violation;
}

std::optional<std::uint64_t> column_order_threshold(const PolynomialFamily& fam,
                                                    const PastWeights& w) {
  std::vector<std::size_t> identity(fam.m);
  std::iota(identity.begin(), identity.end(), 0);

  std::vector<IntPoly> sums(fam.m);
  for (std::size_t j = 0; j < fam.m; ++j) sums[j] = weighted_column_sum(fam, w, j);

  std::uint64_t scan_to = 0;
  for (std::size_t k = 0; k < fam.m; ++k) {
    for (std::size_t l = k + 1; l < fam.m; ++l) {
      if (!eventually_greater(sums[k], sums[l])) return std::nullopt;
      scan_to = std::max(scan_to, root_bound(sums[k] - sums[l]));
    }
  }
  return scan_order_violations(fam, w, identity, scan_to);
}

WeightSelection select_weights(const PolynomialFamily& fam) {
  NondegeneracyReport nd = check_nondegeneracy(fam);
  if (!nd.all_ok()) {
    std::string what = "nondegenerate family required:";
    for (std::size_t j = 0; j < nd.column_ok.size(); ++j)
      if (!nd.column_ok[j]) what += " column " + std::to_string(j) + " constant;";
    for (auto [k, l] : nd.bad_pairs)
      what += " pair (" + std::to_string(k) + "," + std::to_string(l) + ") difference constant;";
    throw degenerate_family_error(what);
  }

  for (std::int64_t B = 1; B <= 1'000'000; ++B) {
    std::vector<std::int64_t> weights(fam.d);
    i128 pw = 1;
    bool in_range = true;
    for (std::size_t i = 0; i < fam.d; ++i) {
      if (pw > i128(std::int64_t(1) << 62)) { in_range = false; break; }
      weights[i] = std::int64_t(pw);
      pw = checked_mul(pw, i128(B));
    }
    if (!in_range) break;
    PastWeights w(weights);

    std::vector<IntPoly> sums(fam.m);
    bool ok = true;
    for (std::size_t j = 0; j < fam.m && ok; ++j) {
      sums[j] = weighted_column_sum(fam, w, j);
      if (sums[j].is_constant()) ok = false;
    }
    for (std::size_t k = 0; k < fam.m && ok; ++k)
      for (std::size_t l = k + 1; l < fam.m && ok; ++l)
        if ((sums[k] - sums[l]).is_constant()) ok = false;
    if (!ok) continue;

    WeightSelection sel;
    sel.weights = w;
    sel.candidate_base = B;
    sel.n0 = 0;
    sel.n1 = 0;

    // order columns so that the weighted sums are eventually decreasing in j
    sel.column_order.resize(fam.m);
    std::iota(sel.column_order.begin(), sel.column_order.end(), 0);
    std::stable_sort(sel.column_order.begin(), sel.column_order.end(),
                     [&](std::size_t a, std::size_t b) { return eventually_greater(sums[a], sums[b]); });

    std::uint64_t scan_to = 0;
    for (std::size_t a = 0; a + 1 < fam.m; ++a)
      for (std::size_t b = a + 1; b < fam.m; ++b)
        scan_to = std::max(scan_to,
                           root_bound(sums[sel.column_order[a]] - sums[sel.column_order[b]]));
    sel.n2 = scan_order_violations(fam, w, sel.column_order, scan_to);
    return sel;
  }
  throw std::runtime_error("weight search exhausted candidate bases");
}

}  // namespace ergolab
