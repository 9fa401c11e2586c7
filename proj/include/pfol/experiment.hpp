#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfol/baselines.hpp"
#include "pfol/env.hpp"
#include "pfol/errors.hpp"
#include "pfol/metrics.hpp"
#include "pfol/pola.hpp"

namespace pfol {

/// Every problem found while validating a config; each message starts with
/// the offending key.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct DomainSpec {
  DomainKind kind = DomainKind::kBall;
  int dim = 2;
  double radius = 1.0;
  double half_width = 1.0;
  int rows = 10;
  int cols = 10;
  double delta = 1.0;
  PowerIterationOptions power{.exact_fallback = true};

  Domain build() const;
};

enum class AlgoName { kBogdIp, kPold, kPola, kOgd };

std::string to_string(AlgoName name);
const std::vector<std::string>& algo_names();

struct AlgoSpec {
  AlgoName name = AlgoName::kBogdIp;
  std::vector<double> scales{1.0};  // step-size multipliers; more than one is a grid
  double eta = 0.0;                 // bogd_ip: explicit step size overriding scale * T^{-3/4}
  bool compensated_sum = false;     // bogd_ip
  AnhVariant anh_variant = AnhVariant::kPaper;  // pola
  int max_level = 30;                           // pola
  OgdSchedule schedule = OgdSchedule::kFixed;   // ogd
};

struct ExperimentConfig {
  StreamSpec stream;
  DomainSpec domain;
  std::vector<AlgoSpec> algorithms;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "pfol_out";
  MetricsOptions metrics;
  int diagnostics_every = 0;  // pold/pola weight snapshots every N rounds; 0 = off
};

/// Parses the flat "dotted.key = value" format. Throws ConfigError listing
/// every problem found.
ExperimentConfig validate_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One learner instance of the experiment: an algorithm at one grid scale.
struct RunUnit {
  std::string algo_id;
  AlgoSpec algo;
  double scale = 1.0;
};

std::vector<RunUnit> expand_units(const ExperimentConfig& cfg);

/// Builds the learner for a unit; the seed drives its oracle randomness.
std::unique_ptr<OnlineLearner> make_learner(const RunUnit& unit, const Stream& stream,
                                            std::uint64_t seed);

/// Resolved configuration as JSON (recorded next to the results).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Runs every (unit, seed) pair with up to `workers` threads and writes
///   runs/<algo_id>__seed<s>.csv   t,algo,seed,loss,cum_loss,lo_calls_cum,wall_ns
///   runs/<algo_id>__seed<s>.json  metrics and resolved parameters
///   report.json                   mean / std across seeds
///   timing.json                   wall clock per run
/// Returns the output directory.
std::filesystem::path run_experiment(const ExperimentConfig& cfg, int workers = 1);

/// Rebuilds report.json from the per-run JSON files in dir/runs.
nlohmann::json aggregate_reports(const std::filesystem::path& dir);

}  // namespace pfol
