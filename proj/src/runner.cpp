#include "ergolab/runner.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace ergolab {

using nlohmann::json;

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(workers, unsigned(count));
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string format_series_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

static void write_series_csv(const std::string& out_dir, const std::vector<SeriesRow>& rows,
                             const std::vector<std::uint64_t>& checkpoints) {
  std::ofstream out(out_dir + "/series.csv", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_dir + "/series.csv");
  out << "stream_id,checkpoint_N,value\n";
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.values.size(); ++c)
      out << row.stream_id << "," << checkpoints[c] << "," << format_series_value(row.values[c])
          << "\n";
}

json select_weights_report(const PolynomialFamily& fam) {
  WeightSelection sel = select_weights(fam);
  json out = json::object();
  out["weights"] = sel.weights.weights;
  out["candidate_base"] = sel.candidate_base;
  out["n0"] = sel.n0;
  out["n1"] = sel.n1;
  out["n2"] = sel.n2;
  json order = json::array();
  for (std::size_t c : sel.column_order) order.push_back(c + 1);  // 1-based columns
  out["column_order"] = order;
  return out;
}

namespace {

struct Prepared {
  SystemInstance sys;
  PolynomialFamily fam;                  // normalized
  std::vector<GroupElement> offsets;     // removed constant terms, one per column
  std::vector<Observable> observables;   // translated to absorb the offsets
};

Prepared prepare(const ExperimentConfig& c) {
  Prepared p;
  p.sys = *c.system;
  NormalizeResult norm = normalize_family(*c.family);
  p.fam = std::move(norm.fam);
  p.offsets = std::move(norm.offsets);
  p.observables.reserve(c.observables.size());
  for (std::size_t j = 0; j < c.observables.size(); ++j)
    p.observables.push_back(translate(c.observables[j], p.sys, p.offsets[j]));
  return p;
}

json offsets_to_json(const std::vector<GroupElement>& offsets) {
  json arr = json::array();
  for (const auto& o : offsets) {
    json inner = json::array();
    for (i128 cc : o.coords) inner.push_back(to_string_i128(cc));
    arr.push_back(inner);
  }
  return arr;
}

json convergence_to_json(const ConvergenceReport& report) {
  json out = json::object();
  out["mean"] = report.mean;
  out["standard_error"] = report.standard_error;
  out["converging_count"] = report.converging_count;
  json per_sample = json::array();
  for (const auto& s : report.samples)
    per_sample.push_back(json{{"stream_id", s.stream_id},
                              {"estimated_limit", s.estimated_limit},
                              {"converging", s.converging}});
  out["samples"] = per_sample;
  return out;
}

std::vector<double> median_tail_oscillation(const ConvergenceReport& report) {
  const std::size_t k = report.samples.front().tail_oscillation.size();
  std::vector<double> medians(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> column;
    column.reserve(report.samples.size());
    for (const auto& s : report.samples) column.push_back(s.tail_oscillation[c]);
    medians[c] = median(std::move(column));
  }
  return medians;
}

int run_series_experiment(const ExperimentConfig& c, const std::string& out_dir, unsigned workers,
                          json& results) {
  Prepared p = prepare(c);
  results["normalization_offsets"] = offsets_to_json(p.offsets);

  if (c.auto_weights) {
    results["selected_weights"] = select_weights_report(*c.family);
  } else if (c.explicit_weights) {
    results["weights"] = c.explicit_weights->weights;
  }

  const CheckpointSchedule& sched = *c.schedule;
  std::vector<SeriesRow> rows(c.samples.count);
  parallel_for(c.samples.count, workers, [&](std::size_t i) {
    const std::uint64_t id = c.samples.first_stream_id + i;
    const Point x = sample_point(p.sys, id);
    if (c.experiment == "cesaro")
      rows[i] = cesaro_series(p.sys, p.observables, p.fam, x, sched, id);
    else if (c.experiment == "weighted")
      rows[i] = weighted_series(p.sys, p.observables, p.fam, *c.weight_sequence, x, sched, id);
    else
      rows[i] = prime_series(p.sys, p.observables, p.fam, x, sched, id);
  });
  write_series_csv(out_dir, rows, sched.checkpoints);

  if (c.experiment == "prime")
    results["conjecture_probe"] = !c.family->generator_assignment.has_value();
  if (c.experiment == "weighted") {
    results["index_start"] = 1;
    results["declared_mean"] = c.weight_sequence->cesaro_mean();
  } else {
    results["index_start"] = 0;
  }

  int exit_code = 0;
  if (sched.checkpoints.size() >= 4) {
    ConvergenceReport report = convergence_report(rows, c.eps);
    results["convergence"] = convergence_to_json(report);
    results["median_tail_oscillation"] = median_tail_oscillation(report);
    if (c.k_limit) {
      KLimitCheck check = k_limit_check(p.sys, p.fam, p.observables, report, *c.k_limit);
      results["k_limit"] = json{{"target", check.target},
                                {"target_exact", to_string(check.target_exact)},
                                {"mean", check.mean},
                                {"mean_deviation", check.mean_deviation},
                                {"frac_within", check.frac_within},
                                {"pass", check.pass}};
      results["target"] = check.target;
      if (!check.pass) exit_code = 2;
    }
  } else {
    results["convergence"] = "skipped (fewer than 4 checkpoints)";
  }
  return exit_code;
}

int run_reduction_gap(const ExperimentConfig& c, const std::string& out_dir, unsigned workers,
                      json& results) {
  Prepared p = prepare(c);
  results["normalization_offsets"] = offsets_to_json(p.offsets);
  const auto& sys = std::get<ProductSystem>(p.sys);
  std::vector<ProductObservable> obs;
  obs.reserve(p.observables.size());
  for (const auto& o : p.observables) obs.push_back(std::get<ProductObservable>(o));

  const CheckpointSchedule& sched = *c.schedule;
  std::vector<SeriesRow> rows(c.samples.count);
  parallel_for(c.samples.count, workers, [&](std::size_t i) {
    rows[i] = reduction_gap_row(sys, obs, p.fam, sched, c.samples.first_stream_id + i);
  });
  write_series_csv(out_dir, rows, sched.checkpoints);

  std::vector<double> medians(sched.checkpoints.size());
  for (std::size_t cc = 0; cc < sched.checkpoints.size(); ++cc) {
    std::vector<double> column;
    column.reserve(rows.size());
    for (const auto& row : rows) column.push_back(row.values[cc]);
    medians[cc] = median(std::move(column));
  }
  results["median_gap"] = medians;

  int exit_code = 0;
  if (c.gap_check) {
    std::uint64_t within = 0;
    for (const auto& row : rows)
      if (row.values.back() <= c.gap_check->final_tol) ++within;
    const double frac = double(within) / double(rows.size());
    bool decreasing = true;
    for (std::size_t cc = 0; cc + 1 < medians.size(); ++cc)
      if (!(medians[cc + 1] < medians[cc])) decreasing = false;
    const bool pass =
        frac >= c.gap_check->frac && (!c.gap_check->median_decreasing || decreasing);
    results["gap_check"] = json{{"final_frac_within", frac},
                                {"median_decreasing", decreasing},
                                {"pass", pass}};
    if (!pass) exit_code = 2;
  }
  return exit_code;
}

int run_maximal(const ExperimentConfig& c, const std::string& out_dir, unsigned /*workers*/,
                json& results) {
  Prepared p = prepare(c);
  write_series_csv(out_dir, {}, {});
  MaximalEstimate est =
      maximal_estimate(p.sys, p.observables[0], p.fam, c.samples.count,
                       c.samples.first_stream_id, c.maximal->n_max, c.maximal->p_norm);
  results["ratio"] = est.ratio;
  results["sup_norm"] = est.sup_norm;
  results["f_norm"] = est.f_norm;
  int exit_code = 0;
  if (c.maximal->ratio_min && est.ratio < *c.maximal->ratio_min) exit_code = 2;
  if (c.maximal->ratio_max && est.ratio > *c.maximal->ratio_max) exit_code = 2;
  return exit_code;
}

int run_orthogonality(const ExperimentConfig& c, const std::string& out_dir, unsigned /*workers*/,
                      json& results) {
  Prepared p = prepare(c);
  results["normalization_offsets"] = offsets_to_json(p.offsets);
  const auto& sys = std::get<BernoulliShiftSystem>(p.sys);

  PastWeights weights;
  if (c.auto_weights) {
    WeightSelection sel = select_weights(*c.family);
    weights = sel.weights;
    results["selected_weights"] = select_weights_report(*c.family);
  } else {
    weights = *c.explicit_weights;
    results["weights"] = weights.weights;
  }

  std::vector<CylinderObservable> obs;
  obs.reserve(p.observables.size());
  for (const auto& o : p.observables) obs.push_back(std::get<CylinderObservable>(o));

  OrthogonalityReport report =
      orthogonality_probe(sys, p.fam, obs, weights, c.orthogonality->g0,
                          c.orthogonality->column_j - 1, c.orthogonality->pairs);
  write_series_csv(out_dir, {}, {});

  json rows = json::array();
  int exit_code = 0;
  std::uint64_t met = 0, violations = 0;
  for (const auto& row : report.rows) {
    json r = json{{"n", row.n},
                  {"m", row.m},
                  {"separation_ok", row.separation_ok},
                  {"beyond_threshold", row.beyond_threshold},
                  {"precondition_met", row.precondition_met},
                  {"value", row.value}};
    if (row.value_exact) r["value_exact"] = to_string(*row.value_exact);
    rows.push_back(r);
    if (row.precondition_met) {
      ++met;
      const bool exact_zero = !row.value_exact || row.value_exact->is_zero();
      if (!exact_zero || std::fabs(row.value) > c.orthogonality->tolerance) ++violations;
    }
  }
  results["pairs"] = rows;
  results["pairs_with_precondition"] = met;
  results["violations"] = violations;
  if (report.order_threshold) results["order_threshold"] = *report.order_threshold;
  if (violations > 0) exit_code = 2;
  return exit_code;
}

int run_verify_past(const ExperimentConfig& c, const std::string& out_dir, unsigned /*workers*/,
                    json& results) {
  write_series_csv(out_dir, {}, {});
  AxiomReport report = verify_past_axioms(*c.explicit_weights, c.verify_past->box_radius);
  results["all_pass"] = report.all_pass;
  results["checked_disjoint"] = report.checked_disjoint;
  results["checked_cover"] = report.checked_cover;
  results["checked_product"] = report.checked_product;
  results["phi_count"] = report.phi_count;
  results["counterexamples"] = report.counterexample ? 1 : 0;
  if (report.counterexample) {
    results["counterexample"] = json{{"axiom", report.counterexample->axiom},
                                     {"g", to_string(report.counterexample->g)},
                                     {"h", to_string(report.counterexample->h)}};
    return 2;
  }
  return 0;
}

int run_entropy(const ExperimentConfig& c, const std::string& out_dir, unsigned /*workers*/,
                json& results) {
  write_series_csv(out_dir, {}, {});
  const auto& sys = std::get<BernoulliShiftSystem>(*c.system);
  const double estimate =
      block_entropy(sys, c.entropy->box_side, c.samples.count, c.samples.first_stream_id);
  const double exact = bernoulli_entropy(sys.prob);
  results["estimate"] = estimate;
  results["exact"] = exact;
  results["deviation"] = std::fabs(estimate - exact);
  results["max_entropy"] = std::log(double(sys.alphabet));
  return std::fabs(estimate - exact) <= c.entropy->tolerance ? 0 : 2;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, const std::string& out_dir, unsigned workers) {
  std::filesystem::create_directories(out_dir);
  RunResult res;
  json results = json::object();

  if (c.experiment == "cesaro" || c.experiment == "weighted" || c.experiment == "prime")
    res.exit_code = run_series_experiment(c, out_dir, workers, results);
  else if (c.experiment == "reduction_gap")
    res.exit_code = run_reduction_gap(c, out_dir, workers, results);
  else if (c.experiment == "maximal")
    res.exit_code = run_maximal(c, out_dir, workers, results);
  else if (c.experiment == "orthogonality")
    res.exit_code = run_orthogonality(c, out_dir, workers, results);
  else if (c.experiment == "verify_past")
    res.exit_code = run_verify_past(c, out_dir, workers, results);
  else
    res.exit_code = run_entropy(c, out_dir, workers, results);

  res.summary = json::object();
  res.summary["experiment"] = c.experiment;
  res.summary["config"] = serialize_config(c);
  res.summary["results"] = results;
  res.summary["exit_code"] = res.exit_code;

  std::ofstream out(out_dir + "/summary.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_dir + "/summary.json");
  out << res.summary.dump(2) << "\n";
  return res;
}

RunResult run_from_file(const std::string& config_path, const std::string& out_dir,
                        unsigned workers, std::optional<std::uint64_t> seed_override) {
  return run_experiment(load_config(config_path, seed_override), out_dir, workers);
}

}  // namespace ergolab
