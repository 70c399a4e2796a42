#include "ergolab/lattice.hpp"

#include <algorithm>

namespace ergolab {

std::string to_string_i128(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  u128 u = neg ? u128(0) - u128(v) : u128(v);
  std::string s;
  while (u != 0) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

i128 parse_i128(const std::string& s) {
  if (s.empty()) throw std::runtime_error("empty integer literal");
  std::size_t pos = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    pos = 1;
  }
  if (pos == s.size()) throw std::runtime_error("bad integer literal: " + s);
  i128 v = 0;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c < '0' || c > '9') throw std::runtime_error("bad integer literal: " + s);
    v = checked_add(checked_mul(v, 10), i128(c - '0'));
  }
  return neg ? checked_neg(v) : v;
}

static void require_same_dim(const GroupElement& a, const GroupElement& b) {
  if (a.dim() != b.dim())
    throw dimension_mismatch("group element dimensions differ: " + std::to_string(a.dim()) +
                             " vs " + std::to_string(b.dim()));
}

GroupElement operator+(const GroupElement& a, const GroupElement& b) {
  require_same_dim(a, b);
  GroupElement r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] = checked_add(r.coords[i], b.coords[i]);
  return r;
}

void add_in_place(GroupElement& a, const GroupElement& b) {
  require_same_dim(a, b);
  for (std::size_t i = 0; i < a.coords.size(); ++i) a.coords[i] = checked_add(a.coords[i], b.coords[i]);
}

GroupElement operator-(const GroupElement& a, const GroupElement& b) {
  require_same_dim(a, b);
  GroupElement r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] = checked_sub(r.coords[i], b.coords[i]);
  return r;
}

GroupElement operator-(const GroupElement& a) {
  GroupElement r = a;
  for (auto& c : r.coords) c = checked_neg(c);
  return r;
}

bool operator==(const GroupElement& a, const GroupElement& b) { return a.coords == b.coords; }

std::string to_string(const GroupElement& g) {
  std::string s = "(";
  for (std::size_t i = 0; i < g.coords.size(); ++i) {
    if (i) s += ",";
    s += to_string_i128(g.coords[i]);
  }
  return s + ")";
}

PastWeights::PastWeights(std::vector<std::int64_t> w) : weights(std::move(w)) {
  if (weights.empty()) throw std::runtime_error("past weights must be nonempty");
  for (std::int64_t a : weights)
    if (a < 1) throw std::runtime_error("past weights must be strictly positive");
}

bool phi_contains(const PastWeights& w, const GroupElement& g) {
  if (w.dim() != g.dim())
    throw dimension_mismatch("weights dimension " + std::to_string(w.dim()) +
                             " vs element dimension " + std::to_string(g.dim()));
  const std::size_t d = w.dim();
  // t_k uses the first d-k coordinates; scan k = 0, 1, ..., d-1.
  for (std::size_t k = 0; k < d; ++k) {
    i128 t = 0;
    for (std::size_t l = 0; l < d - k; ++l)
      t = checked_add(t, checked_mul(i128(w.weights[l]), g.coords[l]));
    if (t != 0) return t < 0;
  }
  return false;  // all partial sums zero forces g = 0
}

OrderOutcome phi_compare(const PastWeights& w, const GroupElement& g1, const GroupElement& g2) {
  require_same_dim(g1, g2);
  if (g1 == g2) return OrderOutcome::Equal;
  return phi_contains(w, g1 - g2) ? OrderOutcome::Less : OrderOutcome::Greater;
}

AxiomReport verify_past_axioms(const PastWeights& w, int box_radius) {
  if (box_radius < 1) throw std::runtime_error("box radius must be >= 1");
  const std::size_t d = w.dim();
  const std::uint64_t side = 2 * std::uint64_t(box_radius) + 1;
  std::uint64_t volume = 1;
  for (std::size_t i = 0; i < d; ++i) {
    volume *= side;
    if (volume > 30'000'000ull) throw std::runtime_error("axiom box too large to enumerate");
  }

  AxiomReport report;

  // Enumerate the box once, collecting Phi ∩ box for the closure check.
  std::vector<GroupElement> in_phi;
  GroupElement g = GroupElement(std::vector<i128>(d, -box_radius));
  auto advance = [&]() -> bool {
    for (std::size_t i = 0; i < d; ++i) {
      if (g.coords[i] < box_radius) {
        ++g.coords[i];
        for (std::size_t jj = 0; jj < i; ++jj) g.coords[jj] = -box_radius;
        return true;
      }
    }
    return false;
  };

  bool more = true;
  while (more) {
    if (!g.is_zero()) {
      const bool fwd = phi_contains(w, g);
      const bool bwd = phi_contains(w, -g);
      ++report.checked_disjoint;
      ++report.checked_cover;
      if (fwd && bwd) {
        report.counterexample = AxiomCounterexample{1, g, -g};
        return report;
      }
      if (!fwd && !bwd) {
        report.counterexample = AxiomCounterexample{2, g, g};
        return report;
      }
      if (fwd) in_phi.push_back(g);
    }
    more = advance();
  }
  report.phi_count = in_phi.size();

  auto inside_box = [&](const GroupElement& e) {
    for (i128 c : e.coords)
      if (c < -box_radius || c > box_radius) return false;
    return true;
  };

  for (const auto& a : in_phi) {
    for (const auto& b : in_phi) {
      GroupElement s = a + b;
      if (!inside_box(s)) continue;
      ++report.checked_product;
      if (!phi_contains(w, s)) {
        report.counterexample = AxiomCounterexample{3, a, b};
        return report;
      }
    }
  }

  report.all_pass = true;
  return report;
}

}  // namespace ergolab
