#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spbp/engine.hpp"

namespace spbp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DebugOptions {
  bool check_feasibility = true;
  bool check_dominance = false;
  bool queue_dump = false;
  bool trace = false;
};

struct ExperimentConfig {
  std::vector<int> sizes;
  int instances_per_size = 10;
  int realizations_per_instance = 10;
  int T = 1000;
  std::uint64_t seed = 1;
  std::vector<Variant> variants;
  TrafficParams traffic;
  RadioParams radio;
  GenerationParams generation;
  RateParams rates;
  int max_iterations = 20;
  std::string output = "results";
  int jobs = 0;  // 0: one per hardware thread
  DebugOptions debug;
};

/// Parses and validates a JSON configuration. A run manifest is accepted
/// too (its "config" member is used). Throws ConfigError naming the
/// offending key.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form of a configuration; parse_config(config_json(c))
/// reproduces c.
std::string config_json(const ExperimentConfig& cfg);

struct RunKey {
  int size = 0;
  int instance = 0;
  int realization = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t realization_seed = 0;
};

/// Every (size, instance, realization) of the sweep, in output order.
std::vector<RunKey> enumerate_runs(const ExperimentConfig& cfg);

ScenarioSpec scenario_spec(const ExperimentConfig& cfg, const RunKey& key);

/// Runs the sweep and writes flows.csv, aggregate.csv and manifest.json (the
/// configuration minus output and jobs, plus version and run count) to
/// cfg.output. Progress goes to `log`. SlotFailure propagates.
void run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Prints, per (network size, variant, traffic class), the mean of every
/// aggregate metric across runs with a 95% confidence half-width.
void summarize(const std::filesystem::path& dir, std::ostream& os);

}  // namespace spbp
