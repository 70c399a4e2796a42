#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "ergolab/runner.hpp"

using namespace ergolab;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("ergolab_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

json constant_cesaro_config() {
  return json{
      {"experiment", "cesaro"},
      {"master_seed", 7},
      {"system", {{"type", "bernoulli"}, {"d", 1}, {"prob", {"1/2", "1/2"}}}},
      {"observables", {{{"type", "constant"}, {"value", 1}}}},
      {"family", {{"columns", {{{0, 1}}}}}},
      {"schedule", {{"checkpoints", {10, 20, 40, 80}}}},
      {"samples", {{"count", 4}}},
  };
}

json klimit_config(std::uint64_t n_max) {
  return json{
      {"experiment", "cesaro"},
      {"master_seed", 20260810},
      {"system", {{"type", "bernoulli"}, {"d", 2}, {"prob", {"1/2", "1/2"}}}},
      {"observables",
       {{{"type", "indicator"}, {"window", {{0, 0}}}, {"symbols", {1}}},
        {{"type", "indicator"}, {"window", {{0, 0}, {0, 1}}}, {"symbols", {1, 1}}}}},
      {"family", {{"columns", {{{0, 0, 3}, {0, 0, 8}}, {{0, 0, 1}, {0, 0, -1}}}}}},
      {"weights", "auto"},
      {"schedule", {{"checkpoints", {n_max / 8, n_max / 4, n_max / 2, n_max}}}},
      {"samples", {{"count", 8}}},
      {"k_limit", {{"mean_tol", 0.05}, {"sample_tol", 0.2}, {"sample_frac", 0.8}}},
  };
}

}  // namespace

TEST_CASE("config validation reports precise field paths") {
  json bad = constant_cesaro_config();
  bad.erase("family");
  CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("config.family"), config_error);

  json bad2 = constant_cesaro_config();
  bad2["experiment"] = "nonsense";
  CHECK_THROWS_WITH_AS(parse_config(bad2), doctest::Contains("config.experiment"), config_error);

  json bad3 = constant_cesaro_config();
  bad3["system"]["prob"] = {"1/2", "1/3"};
  CHECK_THROWS_WITH_AS(parse_config(bad3), doctest::Contains("config.system"), config_error);

  json bad4 = constant_cesaro_config();
  bad4["schedule"] = {{"checkpoints", {10, 10}}};
  CHECK_THROWS_WITH_AS(parse_config(bad4), doctest::Contains("config.schedule"), config_error);

  json bad5 = constant_cesaro_config();
  bad5["family"] = {{"columns", {{{0, 1}}, {{0, 1}}}}};  // two columns, one observable
  CHECK_THROWS_WITH_AS(parse_config(bad5), doctest::Contains("config.observables"), config_error);

  json bad6 = constant_cesaro_config();
  bad6["schedule"] = {{"checkpoints", {10, 200'000'000}}};
  CHECK_THROWS_WITH_AS(parse_config(bad6), doctest::Contains("capped"), config_error);
}

TEST_CASE("rational and fixed-point literals") {
  CHECK(parse_rat(json("1/2"), "x") == Rat(1, 2));
  CHECK(parse_rat(json("0.25"), "x") == Rat(1, 4));
  CHECK(parse_rat(json(0.5), "x") == Rat(1, 2));
  CHECK(parse_rat(json(3), "x") == Rat(3));
  CHECK(parse_rat(json("-2.5"), "x") == Rat(-5, 2));
  CHECK_THROWS_AS(parse_rat(json("1/0"), "x"), config_error);
  CHECK_THROWS_AS(parse_rat(json("abc"), "x"), config_error);

  CHECK(parse_fixed_point(json("1/2"), "x") == (std::uint64_t(1) << 63));
  CHECK(parse_fixed_point(json("golden"), "x") == 0x9E3779B97F4A7C15ull);
  CHECK(parse_fixed_point(json(123456), "x") == 123456);
}

TEST_CASE("constant observable runs produce the constant series") {
  TempDir dir;
  const ExperimentConfig c = parse_config(constant_cesaro_config());
  const RunResult res = run_experiment(c, dir.path.string(), 1);
  CHECK(res.exit_code == 0);

  const std::string csv = slurp(dir.path / "series.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "stream_id,checkpoint_N,value");
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(line.substr(line.rfind(',') + 1) == "1");
    ++rows;
  }
  CHECK(rows == 4 * 4);
}

TEST_CASE("series bytes are identical across worker counts") {
  const json cfg = klimit_config(2000);
  TempDir d1, d2, d8;
  run_experiment(parse_config(cfg), d1.path.string(), 1);
  run_experiment(parse_config(cfg), d2.path.string(), 2);
  run_experiment(parse_config(cfg), d8.path.string(), 8);
  const std::string base = slurp(d1.path / "series.csv");
  CHECK(base == slurp(d2.path / "series.csv"));
  CHECK(base == slurp(d8.path / "series.csv"));
  CHECK(base.find("stream_id,checkpoint_N,value\n") == 0);
}

TEST_CASE("summaries echo a config that reproduces the run") {
  const json cfg = klimit_config(1000);
  TempDir d1, d2;
  const RunResult first = run_experiment(parse_config(cfg), d1.path.string(), 2);
  const json echoed = first.summary["config"];
  const RunResult second = run_experiment(parse_config(echoed), d2.path.string(), 1);
  CHECK(slurp(d1.path / "series.csv") == slurp(d2.path / "series.csv"));
  CHECK(first.summary["results"]["k_limit"]["target"] == second.summary["results"]["k_limit"]["target"]);
}

TEST_CASE("the k-limit summary reports the exact target") {
  TempDir dir;
  const RunResult res = run_experiment(parse_config(klimit_config(4000)), dir.path.string(), 4);
  CHECK(res.summary["results"]["k_limit"]["target"] == 0.125);
  CHECK(res.summary["results"]["k_limit"]["target_exact"] == "1/8");
  CHECK(res.summary["results"]["selected_weights"]["weights"] == json({1, 2}));
  CHECK(res.summary["results"]["target"] == 0.125);
}

TEST_CASE("weight selection subcommand payload") {
  const PolynomialFamily fam(2, 2,
                             {IntPoly::of({0, 0, 3}), IntPoly::of({0, 0, 1}),
                              IntPoly::of({0, 0, 8}), IntPoly::of({0, 0, -1})});
  const json report = select_weights_report(fam);
  CHECK(report["weights"] == json({1, 2}));
  CHECK(report["candidate_base"] == 2);
  CHECK(report["n2"] == 0);
  CHECK(report["column_order"] == json({1, 2}));
}

TEST_CASE("verify_past experiment exits zero on the worked weights") {
  TempDir dir;
  const json cfg{{"experiment", "verify_past"},
                 {"weights", {1, 2}},
                 {"verify_past", {{"box_radius", 8}}}};
  const RunResult res = run_experiment(parse_config(cfg), dir.path.string(), 1);
  CHECK(res.exit_code == 0);
  CHECK(res.summary["results"]["counterexamples"] == 0);
  CHECK(res.summary["results"]["all_pass"] == true);
}

TEST_CASE("entropy experiment compares against the exact value") {
  TempDir dir;
  const json cfg{{"experiment", "entropy"},
                 {"master_seed", 99},
                 {"system", {{"type", "bernoulli"}, {"d", 2}, {"prob", {"1/2", "1/2"}}}},
                 {"samples", {{"count", 20000}}},
                 {"entropy", {{"box_side", 2}, {"tolerance", 0.05}}}};
  const RunResult res = run_experiment(parse_config(cfg), dir.path.string(), 1);
  CHECK(res.exit_code == 0);
  CHECK(double(res.summary["results"]["deviation"]) < 0.05);
}

TEST_CASE("orthogonality experiment passes on the worked configuration") {
  TempDir dir;
  const json cfg{
      {"experiment", "orthogonality"},
      {"master_seed", 4},
      {"system", {{"type", "bernoulli"}, {"d", 2}, {"prob", {"1/2", "1/2"}}}},
      {"observables",
       {{{"type", "indicator"}, {"window", {{0, 0}}}, {"symbols", {1}}},
        {{"type", "indicator"}, {"window", {{0, 0}, {0, 1}}}, {"symbols", {1, 1}}}}},
      {"family", {{"columns", {{{0, 0, 3}, {0, 0, 8}}, {{0, 0, 1}, {0, 0, -1}}}}}},
      {"weights", {1, 2}},
      {"orthogonality",
       {{"g0", {1, 0}}, {"column_j", 2}, {"pairs", {{3, 2}, {5, 2}, {4, 1}}}}},
  };
  const RunResult res = run_experiment(parse_config(cfg), dir.path.string(), 1);
  CHECK(res.exit_code == 0);
  CHECK(res.summary["results"]["pairs_with_precondition"] == 3);
  CHECK(res.summary["results"]["violations"] == 0);
}

TEST_CASE("seed override changes the sampled points") {
  TempDir d1, d2;
  const json cfg = klimit_config(1000);
  run_experiment(parse_config(cfg), d1.path.string(), 1);
  run_experiment(parse_config(cfg, 12345), d2.path.string(), 1);
  CHECK(slurp(d1.path / "series.csv") != slurp(d2.path / "series.csv"));
}
