#include "ergolab/averaging.hpp"

#include <algorithm>
#include <cmath>

namespace ergolab {

CheckpointSchedule::CheckpointSchedule(std::vector<std::uint64_t> cps) : checkpoints(std::move(cps)) {
  if (checkpoints.empty()) throw std::runtime_error("checkpoint schedule must be nonempty");
  if (checkpoints.front() < 1) throw std::runtime_error("checkpoints start at N >= 1");
  for (std::size_t i = 0; i + 1 < checkpoints.size(); ++i)
    if (checkpoints[i] >= checkpoints[i + 1])
      throw std::runtime_error("checkpoints must be strictly increasing");
}

CheckpointSchedule CheckpointSchedule::geometric(std::uint64_t first, std::uint64_t factor,
                                                 std::uint64_t max) {
  if (first < 1 || factor < 2 || max < first)
    throw std::runtime_error("geometric schedule needs first >= 1, factor >= 2, max >= first");
  std::vector<std::uint64_t> cps;
  for (std::uint64_t n = first; n <= max; n *= factor) cps.push_back(n);
  return CheckpointSchedule(std::move(cps));
}

WeightSequence WeightSequence::constant(double c) {
  WeightSequence w;
  w.kind = Kind::Constant;
  w.constant_value = c;
  w.declared_mean = c;
  w.bound = std::fabs(c);
  return w;
}

WeightSequence WeightSequence::alternating() {
  WeightSequence w;
  w.kind = Kind::Alternating;
  w.declared_mean = 0.0;
  w.bound = 1.0;
  return w;
}

WeightSequence WeightSequence::periodic(std::vector<double> vals) {
  if (vals.empty()) throw std::runtime_error("periodic weights need at least one value");
  WeightSequence w;
  w.kind = Kind::Periodic;
  w.values = std::move(vals);
  double sum = 0;
  w.bound = 0;
  for (double v : w.values) {
    sum += v;
    w.bound = std::max(w.bound, std::fabs(v));
  }
  w.declared_mean = sum / double(w.values.size());
  return w;
}

WeightSequence WeightSequence::table(std::vector<double> vals, double mean) {
  if (vals.empty()) throw std::runtime_error("weight table needs at least one value");
  WeightSequence w;
  w.kind = Kind::Table;
  w.values = std::move(vals);
  w.declared_mean = mean;
  w.bound = 0;
  for (double v : w.values) w.bound = std::max(w.bound, std::fabs(v));
  return w;
}

double WeightSequence::value(std::uint64_t n) const {
  switch (kind) {
    case Kind::Constant: return constant_value;
    case Kind::Alternating: return (n % 2 == 0) ? 1.0 : -1.0;
    case Kind::Periodic: return values[std::size_t((n - 1) % values.size())];
    case Kind::Table:
      if (n - 1 >= values.size()) throw std::runtime_error("weight table shorter than the run");
      return values[std::size_t(n - 1)];
  }
  return 0;
}

// ---------------------------------------------------------------------------
// prime stream

PrimeStream::PrimeStream() { pending_ = {2, 3}; segment_lo_ = 4; }

void PrimeStream::ensure_base(std::uint64_t limit) {
  if (base_limit_ >= limit) return;
  std::uint64_t new_limit = std::max<std::uint64_t>(limit, std::max<std::uint64_t>(base_limit_ * 2, 1024));
  std::vector<char> is_prime(new_limit + 1, 1);
  is_prime[0] = is_prime[1] = 0;
  for (std::uint64_t p = 2; p * p <= new_limit; ++p)
    if (is_prime[p])
      for (std::uint64_t q = p * p; q <= new_limit; q += p) is_prime[q] = 0;
  base_primes_.clear();
  for (std::uint64_t p = 2; p <= new_limit; ++p)
    if (is_prime[p]) base_primes_.push_back(p);
  base_limit_ = new_limit;
}

void PrimeStream::extend() {
  const std::uint64_t lo = segment_lo_;
  const std::uint64_t hi = lo + kSegment;
  std::uint64_t root = std::uint64_t(std::sqrt(double(hi))) + 2;
  ensure_base(root);

  std::vector<char> composite(kSegment, 0);
  for (std::uint64_t p : base_primes_) {
    if (p * p >= hi) break;
    std::uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
    for (std::uint64_t q = start; q < hi; q += p) composite[q - lo] = 1;
  }
  pending_.clear();
  pending_pos_ = 0;
  for (std::uint64_t q = lo; q < hi; ++q)
    if (!composite[q - lo]) pending_.push_back(q);
  segment_lo_ = hi;
}

std::uint64_t PrimeStream::next() {
  while (pending_pos_ >= pending_.size()) extend();
  return pending_[pending_pos_++];
}

// ---------------------------------------------------------------------------
// averaging kernel

namespace {

enum class IndexMode { FromZero, FromOne, Primes };

SeriesRow run_series(const SystemInstance& sys, const std::vector<Observable>& obs,
                     const PolynomialFamily& fam, const Point& x, const CheckpointSchedule& sched,
                     std::uint64_t stream_id, IndexMode mode, const WeightSequence* wseq) {
  if (obs.size() != fam.m)
    throw std::runtime_error("need exactly one observable per family column");
  if (!is_normalized(fam))
    throw std::runtime_error("averaging requires a normalized family (zero constant terms)");
  if (fam.d != acting_dimension(sys))
    throw std::runtime_error("family dimension differs from the acting dimension");

  double product_bound = 1.0;
  for (const auto& f : obs) product_bound *= observable_bound(f);
  if (wseq) product_bound *= wseq->bound;

  PrimeStream primes;
  SeriesRow row;
  row.stream_id = stream_id;
  row.values.reserve(sched.checkpoints.size());

  GroupElement exponent;
  Point y = x;  // scratch reused across iterations
  double sum = 0.0;
  std::uint64_t count = 0;
  std::size_t next_checkpoint = 0;
  const std::uint64_t start = (mode == IndexMode::FromOne) ? 1 : 0;

  for (std::uint64_t n = start; next_checkpoint < sched.checkpoints.size(); ++n) {
    const i128 arg = (mode == IndexMode::Primes) ? i128(primes.next()) : i128(n);
    double term = wseq ? wseq->value(n) : 1.0;
    for (std::size_t j = 0; j < fam.m; ++j) {
      orbit_exponent_into(fam, j, arg, exponent);
      y = x;
      act_in_place(sys, exponent, y);
      term *= evaluate(obs[j], sys, y);
    }
    sum += term;
    ++count;
    if (count == sched.checkpoints[next_checkpoint]) {
      const double a_n = sum / double(count);
      if (std::fabs(a_n) > product_bound + 1e-9)
        throw std::runtime_error("average escaped the uniform bound; inconsistent observable bounds");
      row.values.push_back(a_n);
      ++next_checkpoint;
    }
  }
  return row;
}

}  // namespace

SeriesRow cesaro_series(const SystemInstance& sys, const std::vector<Observable>& obs,
                        const PolynomialFamily& fam, const Point& x,
                        const CheckpointSchedule& sched, std::uint64_t stream_id) {
  return run_series(sys, obs, fam, x, sched, stream_id, IndexMode::FromZero, nullptr);
}

SeriesRow cesaro_series_from_one(const SystemInstance& sys, const std::vector<Observable>& obs,
                                 const PolynomialFamily& fam, const Point& x,
                                 const CheckpointSchedule& sched, std::uint64_t stream_id) {
  return run_series(sys, obs, fam, x, sched, stream_id, IndexMode::FromOne, nullptr);
}

SeriesRow weighted_series(const SystemInstance& sys, const std::vector<Observable>& obs,
                          const PolynomialFamily& fam, const WeightSequence& wseq, const Point& x,
                          const CheckpointSchedule& sched, std::uint64_t stream_id) {
  return run_series(sys, obs, fam, x, sched, stream_id, IndexMode::FromOne, &wseq);
}

SeriesRow prime_series(const SystemInstance& sys, const std::vector<Observable>& obs,
                       const PolynomialFamily& fam, const Point& x,
                       const CheckpointSchedule& sched, std::uint64_t stream_id) {
  return run_series(sys, obs, fam, x, sched, stream_id, IndexMode::Primes, nullptr);
}

// ---------------------------------------------------------------------------
// maximal function

static double observable_p_norm(const Observable& f, const SystemInstance& sys, double p) {
  if (const auto* cyl = std::get_if<CylinderObservable>(&f)) {
    const std::vector<Rat>* prob = nullptr;
    if (const auto* b = std::get_if<BernoulliShiftSystem>(&sys)) prob = &b->prob;
    else if (const auto* pr = std::get_if<ProductSystem>(&sys)) prob = &pr->first.prob;
    else throw incompatible_observable("cylinder observable needs a Bernoulli factor");
    double total = 0;
    for (std::size_t idx = 0; idx < cyl->table.size(); ++idx) {
      double weight = 1;
      std::size_t rest = idx;
      for (std::size_t k = 0; k < cyl->window.size(); ++k) {
        weight *= (*prob)[rest % cyl->alphabet].to_double();
        rest /= cyl->alphabet;
      }
      total += weight * std::pow(std::fabs(cyl->table[idx]), p);
    }
    return std::pow(total, 1.0 / p);
  }
  if (const auto* v = std::get_if<TorusObservable>(&f)) {
    if (const auto* box = std::get_if<TorusBox>(&v->kind)) {
      double vol = 1;
      for (std::uint64_t w : box->width) vol *= double(w) * 0x1p-64;
      return std::fabs(v->scale) * std::pow(vol, 1.0 / p);
    }
    throw std::runtime_error("p-norm of a character is not supported");
  }
  const auto& po = std::get<ProductObservable>(f);
  Observable u = po.u;
  Observable v = po.v;
  return observable_p_norm(u, sys, p) * observable_p_norm(v, sys, p);
}

MaximalEstimate maximal_estimate(const SystemInstance& sys, const Observable& f,
                                 const PolynomialFamily& fam_column, std::uint64_t samples,
                                 std::uint64_t first_stream_id, std::uint64_t n_max,
                                 double p_norm) {
  if (p_norm <= 1.0) throw std::runtime_error("maximal estimate requires p > 1");
  if (fam_column.m != 1) throw std::runtime_error("maximal estimate takes a single-column family");
  if (samples < 1 || n_max < 1) throw std::runtime_error("maximal estimate needs samples and n_max >= 1");

  MaximalEstimate est;
  est.f_norm = observable_p_norm(f, sys, p_norm);
  if (est.f_norm == 0.0) throw std::runtime_error("||f||_p vanishes");

  double acc = 0;
  GroupElement exponent;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Point x = sample_point(sys, first_stream_id + s);
    Point y = x;
    double sum = 0, running_max = 0;
    for (std::uint64_t n = 0; n < n_max; ++n) {
      orbit_exponent_into(fam_column, 0, i128(n), exponent);
      y = x;
      act_in_place(sys, exponent, y);
      sum += evaluate(f, sys, y);
      running_max = std::max(running_max, std::fabs(sum / double(n + 1)));
    }
    acc += std::pow(running_max, p_norm);
  }
  est.sup_norm = std::pow(acc / double(samples), 1.0 / p_norm);
  est.ratio = est.sup_norm / est.f_norm;
  return est;
}

// ---------------------------------------------------------------------------
// exact expectations of translated products

ProductExpectation expectation_of_product(const std::vector<TranslatedCylinder>& terms,
                                          const std::vector<Rat>& prob) {
  if (terms.empty()) return ProductExpectation{Rat(1), 1.0};
  const std::size_t a = terms.front().obs->alphabet;
  for (const auto& t : terms)
    if (t.obs->alphabet != a) throw std::runtime_error("mixed alphabets in product expectation");

  // union of the translated windows, with each term's coordinate positions
  std::vector<GroupElement> union_coords;
  std::vector<std::vector<std::size_t>> positions(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    positions[t].reserve(terms[t].obs->window.size());
    for (const auto& w : terms[t].obs->window) {
      GroupElement absolute = terms[t].shift + w;
      auto it = std::find(union_coords.begin(), union_coords.end(), absolute);
      if (it == union_coords.end()) {
        union_coords.push_back(absolute);
        positions[t].push_back(union_coords.size() - 1);
      } else {
        positions[t].push_back(std::size_t(it - union_coords.begin()));
      }
    }
  }
  if (union_coords.size() > 24)
    throw std::runtime_error("translated windows union exceeds 24 coordinates");
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < union_coords.size(); ++i) {
    total *= a;
    if (total > (1ull << 24)) throw std::runtime_error("product expectation exceeds 2^24 assignments");
  }

  bool all_exact = true;
  for (const auto& t : terms) all_exact = all_exact && t.obs->table_exact.has_value();

  std::vector<double> pd(a);
  for (std::size_t s = 0; s < a; ++s) pd[s] = prob[s].to_double();

  std::vector<std::size_t> symbols(union_coords.size(), 0);
  ProductExpectation out;
  out.value = 0;
  Rat exact_sum = 0;

  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rest = idx;
    for (std::size_t c = 0; c < union_coords.size(); ++c) {
      symbols[c] = std::size_t(rest % a);
      rest /= a;
    }
    double weight = 1;
    for (std::size_t c = 0; c < union_coords.size(); ++c) weight *= pd[symbols[c]];
    double value = weight;
    Rat value_exact = 1;
    if (all_exact)
      for (std::size_t c = 0; c < union_coords.size(); ++c) value_exact *= prob[symbols[c]];
    for (std::size_t t = 0; t < terms.size(); ++t) {
      std::size_t ti = 0, stride = 1;
      for (std::size_t k = 0; k < positions[t].size(); ++k) {
        ti += symbols[positions[t][k]] * stride;
        stride *= a;
      }
      value *= terms[t].obs->table[ti];
      if (all_exact) value_exact *= (*terms[t].obs->table_exact)[ti];
    }
    out.value += value;
    if (all_exact) exact_sum += value_exact;
  }
  if (all_exact) out.exact = exact_sum;
  return out;
}

// ---------------------------------------------------------------------------
// orthogonality probe

OrthogonalityReport orthogonality_probe(const BernoulliShiftSystem& sys,
                                        const PolynomialFamily& fam,
                                        const std::vector<CylinderObservable>& obs,
                                        const PastWeights& w, const GroupElement& g0,
                                        std::size_t j,
                                        const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
  if (obs.size() != fam.m) throw std::runtime_error("need one observable per column");
  if (j >= fam.m) throw std::runtime_error("distinguished column out of range");
  if (!is_normalized(fam)) throw std::runtime_error("probe requires a normalized family");
  if (w.dim() != fam.d || g0.dim() != fam.d) throw std::runtime_error("probe dimension mismatch");
  if (!phi_contains(w, -g0))
    throw std::runtime_error("g0 must lie strictly in the future (-g0 in Phi)");

  // centered difference f_j - E(f_j | A_{g0}) on the window of f_j
  const CylinderObservable conditioned =
      condition_cylinder(obs[j], CoordSet::half_space(w, g0), sys.prob);
  const CylinderObservable centered = cylinder_difference(obs[j], conditioned);

  // the trailing observables enter through their exact means
  Rat tail_exact = 1;
  bool tail_has_exact = true;
  double tail = 1.0;
  for (std::size_t l = j + 1; l < fam.m; ++l) {
    tail *= integral_cylinder(obs[l], sys.prob);
    if (obs[l].table_exact)
      tail_exact *= integral_cylinder_exact(obs[l], sys.prob);
    else
      tail_has_exact = false;
  }

  OrthogonalityReport report;
  report.order_threshold = column_order_threshold(fam, w);

  // containment of every non-distinguished factor in the half-space at
  // g0 + orbit_j(hi): the measurability conditions of the proof
  auto window_inside = [&](const GroupElement& base, const GroupElement& shift,
                           const std::vector<GroupElement>& window) {
    for (const auto& wc : window)
      if (!phi_leq(w, base, shift + wc)) return false;
    return true;
  };
  auto separation = [&](std::uint64_t hi, std::uint64_t lo) {
    const GroupElement base = g0 + orbit_exponent(fam, j, i128(hi));
    for (std::size_t k = 0; k < j; ++k) {
      if (!window_inside(base, orbit_exponent(fam, k, i128(hi)), obs[k].window)) return false;
      if (!window_inside(base, orbit_exponent(fam, k, i128(lo)), obs[k].window)) return false;
    }
    return window_inside(base, orbit_exponent(fam, j, i128(lo)), obs[j].window);
  };

  for (auto [n, m] : pairs) {
    OrthogonalityRow row;
    row.n = n;
    row.m = m;
    row.separation_ok = separation(n, m) || separation(m, n);
    row.beyond_threshold =
        report.order_threshold && std::min(n, m) > *report.order_threshold && n != m;
    row.precondition_met = row.separation_ok && row.beyond_threshold;

    std::vector<TranslatedCylinder> terms;
    for (std::uint64_t idx : {n, m}) {
      for (std::size_t k = 0; k < j; ++k)
        terms.push_back({orbit_exponent(fam, k, i128(idx)), &obs[k]});
      terms.push_back({orbit_exponent(fam, j, i128(idx)), &centered});
    }
    ProductExpectation e = expectation_of_product(terms, sys.prob);
    row.value = tail * tail * e.value;
    if (e.exact && tail_has_exact) row.value_exact = tail_exact * tail_exact * (*e.exact);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace ergolab
