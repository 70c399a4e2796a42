#pragma once
// Model measure-preserving Z^d systems with exact group actions.
//
// Bernoulli shifts are lazy random fields: a point is (seed, offset) and the
// symbol at any absolute lattice coordinate is a keyed hash of it, so orbits
// can reach coordinates near 10^20 without materializing anything. Torus
// rotations use 64-bit fixed point, value/2^64 in [0,1), with wrapping
// arithmetic, so the rotation is exact at any exponent. Products pair the
// two; their zero-entropy factor is exactly the torus side.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ergolab/lattice.hpp"
#include "ergolab/mix64.hpp"
#include "ergolab/rational.hpp"

namespace ergolab {

struct incompatible_observable : std::runtime_error {
  explicit incompatible_observable(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// systems and points

struct BernoulliPoint {
  std::uint64_t point_seed = 0;
  GroupElement offset;  // the action translates this
};

struct TorusPoint {
  std::vector<std::uint64_t> coords;  // fixed point, value / 2^64 in [0,1)
};

struct ProductPoint {
  BernoulliPoint first;
  TorusPoint second;
};

using Point = std::variant<BernoulliPoint, TorusPoint, ProductPoint>;

struct BernoulliShiftSystem {
  std::size_t d = 1;
  std::size_t alphabet = 2;
  std::vector<Rat> prob;  // length = alphabet, entries >= 0, sum 1 (within 1e-12)
  std::uint64_t master_seed = 0;

  BernoulliShiftSystem() = default;
  BernoulliShiftSystem(std::size_t d_, std::vector<Rat> prob_, std::uint64_t seed);

  BernoulliPoint sample(std::uint64_t stream_id) const;
  // symbol at absolute coordinate (point offset already applied by caller)
  int symbol_at_absolute(std::uint64_t point_seed, const GroupElement& absolute) const;
  int symbol_at(const BernoulliPoint& x, const GroupElement& relative) const;

 private:
  // cumulative thresholds floor(2^64 * sum_{l<=i} p_l); symbol(h) is the
  // first i with h < threshold[i] (half-open inverse CDF)
  std::vector<u128> cum_threshold_;
};

struct TorusRotationSystem {
  std::size_t d = 1;  // acting dimension
  std::size_t k = 1;  // torus dimension
  std::vector<std::uint64_t> alphas;  // d*k row-major: alphas[i*k + c]
  std::uint64_t master_seed = 0;

  TorusRotationSystem() = default;
  TorusRotationSystem(std::size_t d_, std::size_t k_, std::vector<std::uint64_t> alphas_,
                      std::uint64_t seed);

  TorusPoint sample(std::uint64_t stream_id) const;
  // displacement of torus coordinate c under group element g (mod 2^64)
  std::uint64_t displacement(const GroupElement& g, std::size_t c) const;
};

struct ProductSystem {
  BernoulliShiftSystem first;
  TorusRotationSystem second;

  ProductSystem() = default;
  ProductSystem(BernoulliShiftSystem f, TorusRotationSystem s);
};

using SystemInstance = std::variant<BernoulliShiftSystem, TorusRotationSystem, ProductSystem>;

std::size_t acting_dimension(const SystemInstance& sys);
Point sample_point(const SystemInstance& sys, std::uint64_t stream_id);
Point act(const SystemInstance& sys, const GroupElement& g, const Point& x);
// applies the action in place (hot path of the averaging engines)
void act_in_place(const SystemInstance& sys, const GroupElement& g, Point& x);

// ---------------------------------------------------------------------------
// observables

struct CylinderObservable {
  std::vector<GroupElement> window;  // distinct lattice coordinates
  std::size_t alphabet = 2;
  // table[idx] with digit k of idx (base alphabet) = symbol at window[k]
  std::vector<double> table;
  std::optional<std::vector<Rat>> table_exact;
  double bound = 0;  // sup |table|

  static CylinderObservable constant(Rat value, std::size_t alphabet = 2);
  static CylinderObservable indicator(std::vector<GroupElement> window, const std::vector<int>& symbols,
                                      std::size_t alphabet);
  static CylinderObservable from_exact_table(std::vector<GroupElement> window,
                                             std::vector<Rat> table, std::size_t alphabet);
  static CylinderObservable from_table(std::vector<GroupElement> window, std::vector<double> table,
                                       std::size_t alphabet);

  std::size_t table_size() const { return table.size(); }
  bool is_constant() const { return window.empty(); }
  void refresh_bound();
};

struct TorusBox {
  // half-open box with wrap-around: coordinate c is inside when
  // (x_c - lo_c) mod 2^64 < width_c; width 0 means empty
  std::vector<std::uint64_t> lo;
  std::vector<std::uint64_t> width;
};

struct TorusCharacter {
  std::vector<std::int64_t> freq;     // integer frequency vector
  std::uint64_t phase_offset = 0;     // value = cos(2 pi (<freq,x> + offset)/2^64)
};

struct TorusObservable {
  std::variant<TorusBox, TorusCharacter> kind;
  double scale = 1.0;
  std::optional<Rat> scale_exact = Rat(1);

  static TorusObservable box(std::vector<std::uint64_t> lo, std::vector<std::uint64_t> width);
  static TorusObservable character(std::vector<std::int64_t> freq);
  double bound() const;
};

struct ProductObservable {
  CylinderObservable u;  // first-factor (Bernoulli) part
  TorusObservable v;     // second-factor (torus) part
};

using Observable = std::variant<CylinderObservable, TorusObservable, ProductObservable>;

double evaluate(const Observable& obs, const SystemInstance& sys, const Point& x);
double observable_bound(const Observable& obs);

// exact integral with respect to the invariant measure; throws when the
// exact path is unavailable (missing exact table, fixed-point blowup)
Rat integral_exact(const Observable& obs, const SystemInstance& sys);
double integral(const Observable& obs, const SystemInstance& sys);

// f composed with the action of t (reads coordinates shifted by t)
Observable translate(const Observable& obs, const SystemInstance& sys, const GroupElement& t);
CylinderObservable translate_cylinder(const CylinderObservable& f, const GroupElement& t);

// conditional expectation onto the zero-entropy factor of a product system:
// u (x) v collapses to the torus observable (integral of u) * v
TorusObservable pinsker_project(const ProductObservable& obs, const ProductSystem& sys);

// exact integral of a cylinder observable under the product measure given by
// prob (requires the exact table)
Rat integral_cylinder_exact(const CylinderObservable& f, const std::vector<Rat>& prob);
double integral_cylinder(const CylinderObservable& f, const std::vector<Rat>& prob);

}  // namespace ergolab
