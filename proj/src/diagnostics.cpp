#include "ergolab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace ergolab {

ConvergenceReport convergence_report(const std::vector<SeriesRow>& rows, double eps) {
  if (rows.empty()) throw std::runtime_error("convergence report needs at least one sample");
  const std::size_t k = rows.front().values.size();
  if (k < 4) throw std::runtime_error("convergence report needs at least 4 checkpoints");

  ConvergenceReport report;
  report.samples.reserve(rows.size());
  double sum = 0, sumsq = 0;
  for (const auto& row : rows) {
    if (row.values.size() != k) throw std::runtime_error("ragged series rows");
    SampleConvergence s;
    s.stream_id = row.stream_id;
    s.estimated_limit = row.values.back();
    s.tail_oscillation.resize(k);
    double hi = row.values.back(), lo = row.values.back();
    for (std::size_t i = k; i-- > 0;) {
      hi = std::max(hi, row.values[i]);
      lo = std::min(lo, row.values[i]);
      s.tail_oscillation[i] = hi - lo;
    }
    s.converging = s.tail_oscillation[k - 2] <= eps;
    if (s.converging) ++report.converging_count;
    sum += s.estimated_limit;
    report.samples.push_back(std::move(s));
  }
  report.mean = sum / double(rows.size());
  for (const auto& s : report.samples) {
    const double d = s.estimated_limit - report.mean;
    sumsq += d * d;
  }
  if (rows.size() > 1)
    report.standard_error = std::sqrt(sumsq / double(rows.size() - 1)) / std::sqrt(double(rows.size()));
  return report;
}

KLimitCheck k_limit_check(const SystemInstance& sys, const PolynomialFamily& fam,
                          const std::vector<Observable>& obs, const ConvergenceReport& report,
                          const KLimitTolerances& tol) {
  if (!std::holds_alternative<BernoulliShiftSystem>(sys))
    throw std::runtime_error("limit comparison is only valid on a Bernoulli system");
  NondegeneracyReport nd = check_nondegeneracy(fam);
  if (!nd.all_ok())
    throw degenerate_family_error("limit formula hypotheses need a nondegenerate family");

  KLimitCheck check;
  check.target_exact = Rat(1);
  for (const auto& f : obs) check.target_exact *= integral_exact(f, sys);
  check.target = check.target_exact.to_double();
  check.mean = report.mean;
  check.mean_deviation = std::fabs(report.mean - check.target);

  std::uint64_t within = 0;
  for (const auto& s : report.samples)
    if (std::fabs(s.estimated_limit - check.target) <= tol.sample_tol) ++within;
  check.frac_within = double(within) / double(report.samples.size());
  check.pass = check.mean_deviation <= tol.mean_tol && check.frac_within >= tol.sample_frac;
  return check;
}

SeriesRow reduction_gap_row(const ProductSystem& sys, const std::vector<ProductObservable>& obs,
                            const PolynomialFamily& fam, const CheckpointSchedule& sched,
                            std::uint64_t stream_id) {
  SystemInstance instance = sys;
  std::vector<Observable> full, projected;
  full.reserve(obs.size());
  projected.reserve(obs.size());
  for (const auto& f : obs) {
    full.push_back(f);
    projected.push_back(pinsker_project(f, sys));
  }
  const Point x = sample_point(instance, stream_id);
  const SeriesRow a = cesaro_series(instance, full, fam, x, sched, stream_id);
  const SeriesRow b = cesaro_series(instance, projected, fam, x, sched, stream_id);
  SeriesRow gap;
  gap.stream_id = stream_id;
  gap.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) gap.values[i] = std::fabs(a.values[i] - b.values[i]);
  return gap;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::runtime_error("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

GapAggregate reduction_gap(const ProductSystem& sys, const std::vector<ProductObservable>& obs,
                           const PolynomialFamily& fam, const CheckpointSchedule& sched,
                           std::uint64_t samples, std::uint64_t first_stream_id) {
  GapAggregate agg;
  agg.rows.reserve(samples);
  for (std::uint64_t s = 0; s < samples; ++s)
    agg.rows.push_back(reduction_gap_row(sys, obs, fam, sched, first_stream_id + s));
  agg.median_per_checkpoint.resize(sched.checkpoints.size());
  for (std::size_t c = 0; c < sched.checkpoints.size(); ++c) {
    std::vector<double> column;
    column.reserve(samples);
    for (const auto& row : agg.rows) column.push_back(row.values[c]);
    agg.median_per_checkpoint[c] = median(std::move(column));
  }
  return agg;
}

double block_entropy(const BernoulliShiftSystem& sys, int box_side, std::uint64_t samples,
                     std::uint64_t first_stream_id) {
  if (box_side < 1) throw std::runtime_error("block entropy needs box side >= 1");
  if (samples < 1) throw std::runtime_error("block entropy needs at least one sample");
  std::uint64_t cells = 1;
  for (std::size_t i = 0; i < sys.d; ++i) {
    cells *= std::uint64_t(box_side);
    if (cells > 16) throw std::runtime_error("block entropy box limited to 16 cells");
  }
  {
    double keys = 1;
    for (std::uint64_t i = 0; i < cells; ++i) keys *= double(sys.alphabet);
    if (keys > 9.0e18) throw std::runtime_error("block entropy key space too large");
  }

  // fixed enumeration of the box coordinates
  std::vector<GroupElement> box;
  box.reserve(std::size_t(cells));
  GroupElement g = GroupElement::zero(sys.d);
  bool more = true;
  while (more) {
    box.push_back(g);
    more = false;
    for (std::size_t i = 0; i < sys.d; ++i) {
      if (g.coords[i] + 1 < box_side) {
        ++g.coords[i];
        for (std::size_t jj = 0; jj < i; ++jj) g.coords[jj] = 0;
        more = true;
        break;
      }
    }
  }

  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const BernoulliPoint x = sys.sample(first_stream_id + s);
    std::uint64_t key = 0, stride = 1;
    for (const auto& c : box) {
      key += stride * std::uint64_t(sys.symbol_at(x, c));
      stride *= sys.alphabet;
    }
    ++counts[key];
  }

  double h = 0;
  for (const auto& [key, count] : counts) {
    (void)key;
    const double p = double(count) / double(samples);
    h -= p * std::log(p);
  }
  return h / double(cells);
}

double bernoulli_entropy(const std::vector<Rat>& prob) {
  double h = 0;
  for (const Rat& p : prob) {
    const double v = p.to_double();
    if (v > 0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace ergolab
