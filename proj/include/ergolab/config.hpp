#pragma once
// Experiment configuration: JSON ingestion, validation with field paths, and
// the canonical echo that makes summary files re-runnable.

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>

#include "ergolab/averaging.hpp"
#include "ergolab/diagnostics.hpp"

namespace ergolab {

struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct SamplesSpec {
  std::uint64_t count = 1;
  std::uint64_t first_stream_id = 0;
};

struct GapCheckSpec {
  double final_tol = 0.05;
  double frac = 0.9;
  bool median_decreasing = true;
};

struct MaximalSpec {
  std::uint64_t n_max = 1;
  double p_norm = 2.0;
  std::optional<double> ratio_min, ratio_max;  // regression band
};

struct OrthogonalitySpec {
  GroupElement g0;
  std::size_t column_j = 1;  // 1-based in the file, stored 1-based here
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  double tolerance = 1e-12;
};

struct EntropySpec {
  int box_side = 2;
  double tolerance = 0.05;
};

struct VerifyPastSpec {
  int box_radius = 8;
};

struct ExperimentConfig {
  std::string experiment;  // cesaro | weighted | prime | reduction_gap |
                           // maximal | orthogonality | verify_past | entropy
  std::uint64_t master_seed = 0;
  std::optional<SystemInstance> system;
  std::vector<Observable> observables;
  std::optional<PolynomialFamily> family;
  std::optional<PastWeights> explicit_weights;
  bool auto_weights = false;
  std::optional<CheckpointSchedule> schedule;
  SamplesSpec samples;
  double eps = 0.01;  // convergence verdict tolerance
  std::optional<WeightSequence> weight_sequence;
  std::optional<KLimitTolerances> k_limit;
  std::optional<GapCheckSpec> gap_check;
  std::optional<MaximalSpec> maximal;
  std::optional<OrthogonalitySpec> orthogonality;
  std::optional<EntropySpec> entropy;
  std::optional<VerifyPastSpec> verify_past;
  std::optional<PastWeights> past_weights;  // for verify_past and orthogonality
};

// Parses and validates; optional seed override replaces the master seed
// before derived seeds are resolved. Throws config_error with field paths.
ExperimentConfig parse_config(const nlohmann::json& j,
                              std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(const std::string& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

// canonical re-runnable form; parse_config(serialize_config(c)) reproduces c
nlohmann::json serialize_config(const ExperimentConfig& c);

// shared value parsers (also used by the weight-selection subcommand)
Rat parse_rat(const nlohmann::json& v, const std::string& path);
std::uint64_t parse_fixed_point(const nlohmann::json& v, const std::string& path);
PolynomialFamily parse_family(const nlohmann::json& v, const std::string& path);
nlohmann::json family_to_json(const PolynomialFamily& fam);

}  // namespace ergolab
