#include <iostream>

#include <CLI11.hpp>

#include "pfol/errors.hpp"
#include "pfol/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pfol: projection-free online learning experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int workers = 1;
  auto* run = app.add_subcommand("run", "run every algorithm and seed of a config");
  run->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "parallel runs")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "output directory (overrides output_dir)");

  auto* validate = app.add_subcommand("validate", "check a config and print the resolved values");
  validate->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);

  std::string dir;
  auto* report = app.add_subcommand("report", "rebuild report.json from per-run results");
  report->add_option("--dir", dir, "output directory of a run")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      pfol::ExperimentConfig cfg = pfol::load_config(config);
      if (!out.empty()) cfg.output_dir = out;
      const auto path = pfol::run_experiment(cfg, workers);
      std::cout << "wrote " << path.string() << "\n";
    } else if (*validate) {
      const pfol::ExperimentConfig cfg = pfol::load_config(config);
      std::cout << pfol::config_to_json(cfg).dump(2) << "\n";
    } else if (*report) {
      std::cout << pfol::aggregate_reports(dir).dump(2) << "\n";
    }
  } catch (const pfol::ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "error: " << msg << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
