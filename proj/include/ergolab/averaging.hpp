#pragma once
// The averaging engines: Cesaro, weighted, and prime-indexed polynomial
// multiple averages A_N(x) = (1/N) sum_n prod_j f_j(T^{orbit_j(n)} x),
// recorded at a checkpoint schedule, plus the maximal-function estimator and
// the martingale-difference orthogonality probe.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ergolab/conditioning.hpp"
#include "ergolab/polys.hpp"
#include "ergolab/systems.hpp"
#include "ergolab/weight_selection.hpp"

namespace ergolab {

struct CheckpointSchedule {
  std::vector<std::uint64_t> checkpoints;  // strictly increasing, first >= 1

  CheckpointSchedule() = default;
  explicit CheckpointSchedule(std::vector<std::uint64_t> cps);
  static CheckpointSchedule geometric(std::uint64_t first, std::uint64_t factor,
                                      std::uint64_t max);
  std::uint64_t max_n() const { return checkpoints.back(); }
};

struct SeriesRow {
  std::uint64_t stream_id = 0;
  std::vector<double> values;  // one per checkpoint
};

struct WeightSequence {
  enum class Kind { Constant, Alternating, Periodic, Table };
  Kind kind = Kind::Constant;
  double constant_value = 1.0;
  std::vector<double> values;
  double declared_mean = 1.0;
  double bound = 1.0;

  static WeightSequence constant(double c);
  static WeightSequence alternating();  // g(n) = (-1)^n
  static WeightSequence periodic(std::vector<double> vals);
  static WeightSequence table(std::vector<double> vals, double mean);

  double value(std::uint64_t n) const;  // defined for n >= 1
  double cesaro_mean() const { return declared_mean; }
};

// Streams the primes 2, 3, 5, ... with a segmented sieve; the frontier
// extends on demand.
class PrimeStream {
 public:
  PrimeStream();
  std::uint64_t next();

 private:
  void ensure_base(std::uint64_t limit);
  void extend();

  std::vector<std::uint64_t> base_primes_;
  std::uint64_t base_limit_ = 0;
  std::vector<std::uint64_t> pending_;
  std::size_t pending_pos_ = 0;
  std::uint64_t segment_lo_ = 2;
  static constexpr std::uint64_t kSegment = 1u << 16;
};

// (1/N) sum_{n=0}^{N-1} prod_j f_j(T^{orbit_j(n)} x) at each checkpoint.
// The family must be normalized (zero constant terms).
SeriesRow cesaro_series(const SystemInstance& sys, const std::vector<Observable>& obs,
                        const PolynomialFamily& fam, const Point& x,
                        const CheckpointSchedule& sched, std::uint64_t stream_id);

// same sum restricted to n = 1..N; shared kernel behind the weighted engine
SeriesRow cesaro_series_from_one(const SystemInstance& sys, const std::vector<Observable>& obs,
                                 const PolynomialFamily& fam, const Point& x,
                                 const CheckpointSchedule& sched, std::uint64_t stream_id);

// (1/N) sum_{n=1}^{N} g(n) prod_j f_j(T^{orbit_j(n)} x)
SeriesRow weighted_series(const SystemInstance& sys, const std::vector<Observable>& obs,
                          const PolynomialFamily& fam, const WeightSequence& wseq, const Point& x,
                          const CheckpointSchedule& sched, std::uint64_t stream_id);

// (1/N) sum_{n=0}^{N-1} prod_j f_j(T^{orbit_j(a_n)} x) along the primes a_n
SeriesRow prime_series(const SystemInstance& sys, const std::vector<Observable>& obs,
                       const PolynomialFamily& fam, const Point& x,
                       const CheckpointSchedule& sched, std::uint64_t stream_id);

struct MaximalEstimate {
  double ratio = 0;       // ||sup_N |A_N|||_p / ||f||_p, Monte Carlo estimate
  double sup_norm = 0;    // numerator
  double f_norm = 0;      // denominator, computed from the invariant measure
};

// Empirical lower-bound witness for the maximal-inequality constant; the
// family must have a single column.
MaximalEstimate maximal_estimate(const SystemInstance& sys, const Observable& f,
                                 const PolynomialFamily& fam_column, std::uint64_t samples,
                                 std::uint64_t first_stream_id, std::uint64_t n_max,
                                 double p_norm);

// a formal translate f(T^shift .) of a cylinder observable
struct TranslatedCylinder {
  GroupElement shift;
  const CylinderObservable* obs;
};

struct ProductExpectation {
  std::optional<Rat> exact;  // present when every factor has an exact table
  double value = 0;
};

// E[prod_t f_t(T^{shift_t} .)] under the product measure, by summation over
// the union of the translated windows (at most 24 coordinates)
ProductExpectation expectation_of_product(const std::vector<TranslatedCylinder>& terms,
                                          const std::vector<Rat>& prob);

struct OrthogonalityRow {
  std::uint64_t n = 0, m = 0;
  bool separation_ok = false;    // half-space containments of the proof hold
  bool beyond_threshold = false; // both indices exceed the column-order threshold
  bool precondition_met = false; // separation_ok && beyond_threshold
  std::optional<Rat> value_exact;
  double value = 0;  // E[X_n X_m]
};

struct OrthogonalityReport {
  std::optional<std::uint64_t> order_threshold;  // N_2 for the given column order
  std::vector<OrthogonalityRow> rows;
};

// Martingale-difference probe: X_n multiplies the first j-1 observables
// along their orbits, the centered difference f_j - E(f_j | A_{g0}) along
// orbit j, and the constant integrals of the remaining observables (the
// trivial-tail collapse on a Bernoulli system). Reports exact E[X_n X_m]
// per pair together with whether the measurability preconditions held.
// j is 0-based; g0 must lie strictly in the future (-g0 in Phi).
OrthogonalityReport orthogonality_probe(const BernoulliShiftSystem& sys,
                                        const PolynomialFamily& fam,
                                        const std::vector<CylinderObservable>& obs,
                                        const PastWeights& w, const GroupElement& g0,
                                        std::size_t j,
                                        const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs);

}  // namespace ergolab
