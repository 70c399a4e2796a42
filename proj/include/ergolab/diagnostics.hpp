#pragma once
// Convergence evidence and limit comparisons. A verdict of "converging" is an
// engineering statement about tail oscillation at an explicit eps; divergence
// is never asserted.

#include <cstdint>
#include <vector>

#include "ergolab/averaging.hpp"

namespace ergolab {

struct SampleConvergence {
  std::uint64_t stream_id = 0;
  double estimated_limit = 0;            // value at the last checkpoint
  std::vector<double> tail_oscillation;  // osc_k = max-min over checkpoints >= k
  bool converging = false;
};

struct ConvergenceReport {
  std::vector<SampleConvergence> samples;
  double mean = 0;            // mean of estimated limits across samples
  double standard_error = 0;  // sample standard deviation / sqrt(count)
  std::uint64_t converging_count = 0;
};

// Requires at least 4 checkpoints. The verdict compares the oscillation of
// the final two checkpoints against eps.
ConvergenceReport convergence_report(const std::vector<SeriesRow>& rows, double eps);

struct KLimitTolerances {
  double mean_tol = 0.01;    // |cross-sample mean - target|
  double sample_tol = 0.05;  // per-sample deviation band
  double sample_frac = 0.9;  // required fraction of samples inside the band
};

struct KLimitCheck {
  Rat target_exact;
  double target = 0;
  double mean = 0;
  double mean_deviation = 0;
  double frac_within = 0;
  bool pass = false;
};

// Compares estimated limits against the product of the exact integrals, the
// limit value on a K-system. Requires a Bernoulli system and a nondegenerate
// family (the hypotheses of the limit formula); refuses otherwise.
KLimitCheck k_limit_check(const SystemInstance& sys, const PolynomialFamily& fam,
                          const std::vector<Observable>& obs, const ConvergenceReport& report,
                          const KLimitTolerances& tol);

// |A_N(f) - A_N(projection of f)| per checkpoint for one sample point: the
// full averages against the averages of the zero-entropy-factor projections
SeriesRow reduction_gap_row(const ProductSystem& sys, const std::vector<ProductObservable>& obs,
                            const PolynomialFamily& fam, const CheckpointSchedule& sched,
                            std::uint64_t stream_id);

struct GapAggregate {
  std::vector<SeriesRow> rows;
  std::vector<double> median_per_checkpoint;
};

GapAggregate reduction_gap(const ProductSystem& sys, const std::vector<ProductObservable>& obs,
                           const PolynomialFamily& fam, const CheckpointSchedule& sched,
                           std::uint64_t samples, std::uint64_t first_stream_id);

double median(std::vector<double> values);

// Plug-in block entropy per site over the box [0,r)^d, from sampled points.
// Requires r^d <= 16 and alphabet^(r^d) within 2^63.
double block_entropy(const BernoulliShiftSystem& sys, int box_side, std::uint64_t samples,
                     std::uint64_t first_stream_id);

// exact entropy of the symbol distribution, -sum p log p
double bernoulli_entropy(const std::vector<Rat>& prob);

}  // namespace ergolab
