#pragma once
// Experiment orchestration: deterministic parallel execution over stream ids,
// CSV/JSON emission, and the pass/fail exit contract (0 pass, 1 config error,
// 2 failed tolerance).

#include <functional>
#include <string>

#include "ergolab/config.hpp"

namespace ergolab {

struct RunResult {
  int exit_code = 0;
  nlohmann::json summary;
};

// Runs the experiment, writing series.csv and summary.json under out_dir.
// Output is byte-identical for a fixed config regardless of worker count.
RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                         unsigned workers);

RunResult run_from_file(const std::string& config_path, const std::string& out_dir,
                        unsigned workers, std::optional<std::uint64_t> seed_override);

// machine-readable weight selection report for the CLI subcommand
nlohmann::json select_weights_report(const PolynomialFamily& fam);

// Deterministic worker pool: fn(i) for i in [0, count); results must be
// written to per-index slots. Rethrows the first worker exception.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

std::string format_series_value(double v);

}  // namespace ergolab
