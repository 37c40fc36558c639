#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dmab/bounds.hpp"
#include "dmab/harness.hpp"
#include "dmab/metrics.hpp"
#include "dmab/oracles.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitOracleFailure = 3;
constexpr int kExitIoError = 4;

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dmab::IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw dmab::ConfigError(path, std::string("JSON parse error: ") + e.what());
  }
  return j;
}

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> runs;
  std::optional<std::uint64_t> horizon;
  int threads = 0;
};

int execute(dmab::ExperimentConfig cfg, const Overrides& ov) {
  if (ov.seed) cfg.base_seed = *ov.seed;
  if (ov.runs) cfg.runs = *ov.runs;
  if (ov.horizon) cfg.horizon = *ov.horizon;
  if (ov.out) cfg.out_dir = *ov.out;
  if (cfg.out_dir.empty()) cfg.out_dir = "out";
  const int threads = ov.threads > 0 ? ov.threads : dmab::default_thread_count();

  const auto result = dmab::run_experiment(cfg, threads);
  dmab::write_outputs(cfg, result, cfg.out_dir);
  for (const auto& cell : result.cells)
    for (const auto& agg : cell.aggregates)
      std::cout << cell.label << " " << agg.algorithm
                << ": final regret " << dmab::format_float(agg.mean.back()) << " +- "
                << dmab::format_float(agg.stderr_.back()) << " (" << agg.runs << " runs)\n";
  std::cout << "wrote " << cfg.out_dir << "/{runs.csv,aggregate.csv,summary.json,config.json}\n";
  return 0;
}

int cmd_bounds(const std::string& config_path) {
  const auto cfg = dmab::config_from_json(load_json_file(config_path));
  auto print_for = [&](const dmab::InstanceSpec& inst, const std::string& label) {
    const auto delays = inst.marginal_delays();
    const auto t = cfg.horizon;
    auto show = [&](const char* name, dmab::BoundKind kind) {
      std::cout << label << " " << name << " = "
                << dmab::format_float(dmab::bound_value(kind, inst.gaps, delays, t)) << '\n';
    };
    show("se_per_arm", dmab::BoundKind::kSePerArm);
    show("se_single_q", dmab::BoundKind::kSeSingleQuantile);
    show("pse", dmab::BoundKind::kPse);
    show("opse", dmab::BoundKind::kOpse);
  };
  if (cfg.sweep) {
    for (const auto& value : cfg.sweep->values) {
      nlohmann::json params =
          cfg.instance.params.is_null() ? nlohmann::json::object() : cfg.instance.params;
      params[cfg.sweep->param] = value;
      const auto inst = dmab::build_preset_instance(cfg.instance.preset, params);
      print_for(inst, inst.name + "[" + cfg.sweep->param + "=" + value.dump() + "]");
    }
  } else if (cfg.instance.inline_spec) {
    print_for(*cfg.instance.inline_spec, cfg.instance.inline_spec->name);
  } else {
    const auto inst = dmab::build_preset_instance(cfg.instance.preset, cfg.instance.params);
    print_for(inst, inst.name);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delayed-feedback multi-armed bandit simulator"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;
  std::string preset_name;
  std::string lemma;
  std::uint64_t verify_seed = 7;

  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--out", ov.out, "output directory");
    cmd->add_option("--seed", ov.seed, "base seed override");
    cmd->add_option("--runs", ov.runs, "run count override");
    cmd->add_option("--horizon", ov.horizon, "horizon (T) override");
    cmd->add_option("--threads", ov.threads, "worker threads (default: DMAB_THREADS or cores)");
  };

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "config JSON path")->required();
  add_run_options(run);

  auto* experiment = app.add_subcommand("experiment", "run a named preset experiment");
  experiment->add_option("name", preset_name, "one of: fig1 fig2 fig3 fig4 ucb-adv dep-lower")
      ->required();
  add_run_options(experiment);

  auto* verify = app.add_subcommand("verify", "run the lemma oracle suite");
  verify->add_option("--lemma", lemma,
                     "only this lemma (estimator-concentration, chernoff-quantile, "
                     "hoeffding-quantile, interval-size)");
  verify->add_option("--seed", verify_seed, "suite seed");
  verify->add_option("--threads", ov.threads, "worker threads");

  auto* bounds = app.add_subcommand("bounds", "print theorem bound values for a config");
  bounds->add_option("--config", config_path, "config JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return execute(dmab::config_from_json(load_json_file(config_path)), ov);
    if (experiment->parsed()) return execute(dmab::preset(preset_name), ov);
    if (bounds->parsed()) return cmd_bounds(config_path);
    if (verify->parsed()) {
      const int threads = ov.threads > 0 ? ov.threads : dmab::default_thread_count();
      const auto outcomes = dmab::run_oracle_suite(verify_seed, threads, lemma);
      if (outcomes.empty()) {
        std::cerr << "no oracle matches lemma '" << lemma << "'\n";
        return kExitConfigError;
      }
      bool all_ok = true;
      for (const auto& outcome : outcomes) {
        std::cout << dmab::format_report_line(outcome) << '\n';
        all_ok = all_ok && outcome.ok;
      }
      return all_ok ? 0 : kExitOracleFailure;
    }
  } catch (const dmab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const dmab::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
