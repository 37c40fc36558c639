#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmab/agents.hpp"
#include "dmab/instances.hpp"
#include "dmab/metrics.hpp"

// Config ingestion, preset experiments, seed management, parallel run
// orchestration and CSV/JSON output.

namespace dmab {

// Invalid configuration; `path` names the offending field (e.g. "algorithms[0].name").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AlgorithmConfig {
  std::string name;
  RadiusSpec radius;
};

struct SweepSpec {
  std::string param;
  std::vector<nlohmann::json> values;
};

struct InstanceConfig {
  std::string preset;      // one of the registered instance names; empty when inline
  nlohmann::json params;   // preset parameters (defaults applied per preset)
  std::optional<InstanceSpec> inline_spec;
};

struct ExperimentConfig {
  InstanceConfig instance;
  std::vector<AlgorithmConfig> algorithms;
  std::uint64_t horizon = 0;
  std::uint64_t runs = 0;
  std::uint64_t base_seed = 0;
  std::uint64_t checkpoint_every = 1;
  std::string out_dir;
  std::optional<SweepSpec> sweep;
  bool record_actions = false;
  std::vector<std::string> notes;  // reproduction choices, emitted with the config
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

// Instance registry: fig1, fig2, fig3, fig4, ucb-adv, dep-lower, dep-lower-i1,
// dep-lower-i2, twopoint. Unknown names or parameters raise ConfigError.
InstanceSpec build_preset_instance(const std::string& preset, const nlohmann::json& params);

// Experiment presets: fig1 | fig2 | fig3 | fig4 | ucb-adv | dep-lower.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct CellResult {
  std::string label;  // instance name, with the sweep value suffixed when sweeping
  InstanceSpec instance;
  std::vector<std::vector<RunRecord>> runs_per_algorithm;
  std::vector<Aggregate> aggregates;  // one per algorithm
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  nlohmann::json summary;
};

// Executes the protocol loop for every (sweep value, algorithm, run) cell.
// Run j of every algorithm uses seed mix_seed(base_seed, j), so algorithms
// are compared under common random numbers. Results are ordered by seed index
// regardless of scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads);

// Writes runs.csv, aggregate.csv, summary.json and the resolved config.json.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::string& out_dir);

// --threads override, else DMAB_THREADS, else hardware concurrency.
int default_thread_count();

// Share-nothing parallel loop over [0, n); exceptions are rethrown in order.
void parallel_for(std::uint64_t n, int threads, const std::function<void(std::uint64_t)>& fn);

}  // namespace dmab
