// Command-line front end: runs experiment configs and prints weight
// selections. See README.md for the config schema.

#include <CLI11.hpp>

#include <fstream>
#include <thread>
#include <iostream>

#include "ergolab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ergolab: polynomial multiple ergodic averages on model Z^d systems"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", family_path;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;

  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory for series.csv and summary.json");
  run->add_option("--workers", workers, "worker thread count");
  run->add_option("--seed", seed_override, "master seed override")
      ->each([&](const std::string&) { has_seed_override = true; });

  CLI::App* sw = app.add_subcommand("select-weights", "select past weights for a family");
  sw->add_option("--family", family_path, "JSON file holding the polynomial family")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ergolab::RunResult res = ergolab::run_from_file(
          config_path, out_dir, workers,
          has_seed_override ? std::optional<std::uint64_t>(seed_override) : std::nullopt);
      std::cout << res.summary["results"].dump(2) << "\n";
      return res.exit_code;
    }
    std::ifstream in(family_path);
    if (!in) {
      std::cerr << "cannot open " << family_path << "\n";
      return 1;
    }
    nlohmann::json j;
    in >> j;
    const nlohmann::json& fam_json = j.contains("family") ? j["family"] : j;
    ergolab::PolynomialFamily fam = ergolab::parse_family(fam_json, "family");
    std::cout << ergolab::select_weights_report(fam).dump(2) << "\n";
    return 0;
  } catch (const ergolab::degenerate_family_error& e) {
    nlohmann::json err = {{"error", e.what()}, {"degenerate", true}};
    std::cout << err.dump(2) << "\n";
    return 1;
  } catch (const ergolab::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
