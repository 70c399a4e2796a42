#pragma once
// Exact conditional expectations of cylinder observables onto coordinate
// sigma-algebras of a Bernoulli shift. Under the product measure,
// E(f | coordinates in S) is the prob-weighted average of f over all
// assignments of the window coordinates outside S, a finite sum.
//
// The half-space set {h : g <=_Phi h} realizes the filtration algebras of
// the averaging reduction. As g grows toward future infinity in <_Phi these
// half-spaces shrink, and once one misses the window entirely the
// conditional expectation collapses to the constant integral of f: the tail
// algebra of a Bernoulli shift is trivial.

#include <variant>
#include <vector>

#include "ergolab/systems.hpp"

namespace ergolab {

struct ExplicitSet {
  std::vector<GroupElement> coords;
};

// {h : g <=_Phi h}
struct PastHalfSpace {
  PastWeights w;
  GroupElement g;
};

struct CoordSet {
  std::variant<ExplicitSet, PastHalfSpace> kind;
  // optional candidate restriction; when present, membership additionally
  // requires the coordinate to be listed here
  std::optional<std::vector<GroupElement>> hull;

  static CoordSet explicit_set(std::vector<GroupElement> coords) {
    return CoordSet{ExplicitSet{std::move(coords)}, std::nullopt};
  }
  static CoordSet half_space(PastWeights w, GroupElement g) {
    return CoordSet{PastHalfSpace{std::move(w), std::move(g)}, std::nullopt};
  }
  bool contains(const GroupElement& h) const;
};

// E(f | sigma(coordinates in S)): averages out the window coordinates not in
// S. Exact tables are carried through whenever f has one. Requires
// alphabet^(dropped coordinates) <= 2^24.
CylinderObservable condition_cylinder(const CylinderObservable& f, const CoordSet& S,
                                      const std::vector<Rat>& prob);

// Independent check path: enumerates every assignment of the full window
// (alphabet^|W| <= 2^16) and groups by the restriction to W ∩ S, dividing
// accumulated mass by accumulated weight. Used by tests only.
CylinderObservable condition_oracle(const CylinderObservable& f, const CoordSet& S,
                                    const std::vector<Rat>& prob);

// The sequence E(f | A_{g_k}) for half-space algebras A_g = {h : g <=_Phi h}.
// g_seq must be strictly <_Phi-increasing so the algebras shrink; the
// sequence then stabilizes at the constant integral of f once a half-space
// excludes the whole window.
std::vector<CylinderObservable> martingale_tail(const CylinderObservable& f, const PastWeights& w,
                                                const std::vector<GroupElement>& g_seq,
                                                const std::vector<Rat>& prob);

// ||a - b||_1 under the product measure, on the union of the two windows
Rat l1_distance_exact(const CylinderObservable& a, const CylinderObservable& b,
                      const std::vector<Rat>& prob);

// a - b as a single cylinder observable on the union of the two windows
CylinderObservable cylinder_difference(const CylinderObservable& a, const CylinderObservable& b);

}  // namespace ergolab
