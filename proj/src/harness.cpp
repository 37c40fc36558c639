#include "dmab/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "dmab/bounds.hpp"
#include "dmab/serialize.hpp"
#include "dmab/sim.hpp"

namespace dmab {

using nlohmann::json;

namespace {

const std::set<std::string> kAgentNames = {"ucb", "se", "pse", "opse", "uniform"};

std::uint64_t get_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw ConfigError(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

double get_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

RadiusSpec radius_from_json(const json& j, const std::string& path) {
  RadiusSpec radius;
  if (j.is_null()) return radius;
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "scale")
      radius.scale = get_double(value, path + ".scale");
    else if (key == "log_t") {
      if (!value.is_boolean()) throw ConfigError(path + ".log_t", "expected a boolean");
      radius.log_t = value.get<bool>();
    } else {
      throw ConfigError(path + "." + key, "unknown field");
    }
  }
  if (!(radius.scale > 0.0)) throw ConfigError(path + ".scale", "must be positive");
  return radius;
}

// Preset parameter helpers: every preset declares its parameter names and
// defaults; unknown keys are configuration errors that name the path.
class Params {
 public:
  Params(const json& j, std::string path) : path_(std::move(path)) {
    if (j.is_null()) return;
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
    for (const auto& [key, value] : j.items()) values_[key] = value;
  }

  std::uint64_t u64(const std::string& key, std::optional<std::uint64_t> fallback = {}) {
    auto j = take(key, fallback.has_value());
    return j.is_null() ? *fallback : get_u64(j, path_ + "." + key);
  }
  double number(const std::string& key, std::optional<double> fallback = {}) {
    auto j = take(key, fallback.has_value());
    return j.is_null() ? *fallback : get_double(j, path_ + "." + key);
  }
  std::string text(const std::string& key, std::optional<std::string> fallback = {}) {
    auto j = take(key, fallback.has_value());
    if (j.is_null()) return *fallback;
    if (!j.is_string()) throw ConfigError(path_ + "." + key, "expected a string");
    return j.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    auto j = take(key, false);
    if (!j.is_array()) throw ConfigError(path_ + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(get_double(v, path_ + "." + key + "[]"));
    return out;
  }
  void finish() const {
    if (!values_.empty())
      throw ConfigError(path_ + "." + values_.begin()->first, "unknown parameter");
  }

 private:
  json take(const std::string& key, bool optional) {
    auto it = values_.find(key);
    if (it == values_.end()) {
      if (!optional) throw ConfigError(path_ + "." + key, "missing required parameter");
      return json();
    }
    json out = it->second;
    values_.erase(it);
    return out;
  }

  std::string path_;
  std::map<std::string, json> values_;
};

std::string sweep_label(const std::string& base, const std::string& param, const json& value) {
  std::ostringstream os;
  os << base << '[' << param << '=';
  if (value.is_string())
    os << value.get<std::string>();
  else
    os << value.dump();
  os << ']';
  return os.str();
}

void append_bounds(json& algo_summary, const std::string& algo, const InstanceSpec& inst,
                   std::uint64_t horizon) {
  const bool reward_independent = [&] {
    for (const auto& arm : inst.arms)
      if (!arm.reward_independent()) return false;
    return true;
  }();
  try {
    const auto delays = inst.marginal_delays();
    json bounds;
    auto put = [&](const char* key, BoundKind kind) {
      const double v = bound_value(kind, inst.gaps, delays, horizon);
      if (std::isfinite(v))
        bounds[key] = v;
      else
        bounds[key] = "inf";  // JSON has no infinity literal
    };
    if (algo == "se" && reward_independent) {
      put("se_per_arm", BoundKind::kSePerArm);
      put("se_single_q", BoundKind::kSeSingleQuantile);
    } else if (algo == "pse" && reward_independent) {
      put("pse", BoundKind::kPse);
    } else if (algo == "opse") {
      put("opse", BoundKind::kOpse);
    }
    if (!bounds.empty()) algo_summary["bound"] = std::move(bounds);
  } catch (const std::invalid_argument&) {
    // Marginal not enumerable; bounds omitted.
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  ExperimentConfig cfg;
  bool saw_instance = false, saw_algorithms = false, saw_t = false, saw_runs = false,
       saw_seed = false, saw_cp = false;

  for (const auto& [key, value] : j.items()) {
    if (key == "instance") {
      saw_instance = true;
      if (!value.is_object()) throw ConfigError("instance", "expected an object");
      if (value.contains("inline")) {
        try {
          cfg.instance.inline_spec = instance_from_json(value.at("inline"));
        } catch (const std::invalid_argument& e) {
          throw ConfigError("instance.inline", e.what());
        }
        for (const auto& [ikey, ivalue] : value.items()) {
          (void)ivalue;
          if (ikey != "inline") throw ConfigError("instance." + ikey, "unknown field");
        }
      } else {
        for (const auto& [ikey, ivalue] : value.items()) {
          if (ikey == "preset") {
            if (!ivalue.is_string()) throw ConfigError("instance.preset", "expected a string");
            cfg.instance.preset = ivalue.get<std::string>();
          } else if (ikey == "params") {
            cfg.instance.params = ivalue;
          } else {
            throw ConfigError("instance." + ikey, "unknown field");
          }
        }
        if (cfg.instance.preset.empty())
          throw ConfigError("instance.preset", "missing (or provide instance.inline)");
      }
    } else if (key == "algorithms") {
      saw_algorithms = true;
      if (!value.is_array() || value.empty())
        throw ConfigError("algorithms", "expected a non-empty array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const auto path = "algorithms[" + std::to_string(i) + "]";
        const auto& a = value[i];
        if (!a.is_object()) throw ConfigError(path, "expected an object");
        AlgorithmConfig algo;
        for (const auto& [akey, avalue] : a.items()) {
          if (akey == "name") {
            if (!avalue.is_string()) throw ConfigError(path + ".name", "expected a string");
            algo.name = avalue.get<std::string>();
          } else if (akey == "radius") {
            algo.radius = radius_from_json(avalue, path + ".radius");
          } else {
            throw ConfigError(path + "." + akey, "unknown field");
          }
        }
        if (!kAgentNames.count(algo.name))
          throw ConfigError(path + ".name", "unknown algorithm '" + algo.name + "'");
        cfg.algorithms.push_back(std::move(algo));
      }
    } else if (key == "T") {
      saw_t = true;
      cfg.horizon = get_u64(value, "T");
    } else if (key == "runs") {
      saw_runs = true;
      cfg.runs = get_u64(value, "runs");
    } else if (key == "base_seed") {
      saw_seed = true;
      cfg.base_seed = get_u64(value, "base_seed");
    } else if (key == "checkpoint_every") {
      saw_cp = true;
      cfg.checkpoint_every = get_u64(value, "checkpoint_every");
    } else if (key == "out_dir") {
      if (!value.is_string()) throw ConfigError("out_dir", "expected a string");
      cfg.out_dir = value.get<std::string>();
    } else if (key == "record_actions") {
      if (!value.is_boolean()) throw ConfigError("record_actions", "expected a boolean");
      cfg.record_actions = value.get<bool>();
    } else if (key == "sweep") {
      if (!value.is_object()) throw ConfigError("sweep", "expected an object");
      SweepSpec sweep;
      for (const auto& [skey, svalue] : value.items()) {
        if (skey == "param") {
          if (!svalue.is_string()) throw ConfigError("sweep.param", "expected a string");
          sweep.param = svalue.get<std::string>();
        } else if (skey == "values") {
          if (!svalue.is_array() || svalue.empty())
            throw ConfigError("sweep.values", "expected a non-empty array");
          for (const auto& v : svalue) sweep.values.push_back(v);
        } else {
          throw ConfigError("sweep." + skey, "unknown field");
        }
      }
      if (sweep.param.empty()) throw ConfigError("sweep.param", "missing");
      if (sweep.values.empty()) throw ConfigError("sweep.values", "missing");
      cfg.sweep = std::move(sweep);
    } else if (key == "notes") {
      if (!value.is_array()) throw ConfigError("notes", "expected an array of strings");
      for (const auto& n : value) cfg.notes.push_back(n.get<std::string>());
    } else {
      throw ConfigError(key, "unknown field");
    }
  }

  if (!saw_instance) throw ConfigError("instance", "missing required field");
  if (!saw_algorithms) throw ConfigError("algorithms", "missing required field");
  if (!saw_t) throw ConfigError("T", "missing required field");
  if (!saw_runs) throw ConfigError("runs", "missing required field");
  if (!saw_seed) throw ConfigError("base_seed", "missing required field");
  if (!saw_cp) cfg.checkpoint_every = cfg.horizon;
  if (cfg.runs < 1) throw ConfigError("runs", "must be at least 1");
  if (cfg.horizon < 1) throw ConfigError("T", "must be at least 1");
  if (cfg.checkpoint_every < 1 || cfg.checkpoint_every > cfg.horizon)
    throw ConfigError("checkpoint_every", "must lie in [1, T]");
  if (cfg.sweep && cfg.instance.inline_spec)
    throw ConfigError("sweep", "sweeps require a preset instance");
  if (!cfg.instance.preset.empty()) {
    // Validate the preset name and parameters up front.
    json params = cfg.instance.params.is_null() ? json::object() : cfg.instance.params;
    if (cfg.sweep) params[cfg.sweep->param] = cfg.sweep->values.front();
    build_preset_instance(cfg.instance.preset, params);
  }
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.instance.inline_spec) {
    j["instance"] = json{{"inline", to_json(*cfg.instance.inline_spec)}};
  } else {
    j["instance"] = json{{"preset", cfg.instance.preset}};
    if (!cfg.instance.params.is_null()) j["instance"]["params"] = cfg.instance.params;
  }
  j["algorithms"] = json::array();
  for (const auto& a : cfg.algorithms)
    j["algorithms"].push_back(
        json{{"name", a.name}, {"radius", {{"scale", a.radius.scale}, {"log_t", a.radius.log_t}}}});
  j["T"] = cfg.horizon;
  j["runs"] = cfg.runs;
  j["base_seed"] = cfg.base_seed;
  j["checkpoint_every"] = cfg.checkpoint_every;
  if (!cfg.out_dir.empty()) j["out_dir"] = cfg.out_dir;
  if (cfg.record_actions) j["record_actions"] = true;
  if (cfg.sweep) {
    j["sweep"] = json{{"param", cfg.sweep->param}, {"values", json::array()}};
    for (const auto& v : cfg.sweep->values) j["sweep"]["values"].push_back(v);
  }
  if (!cfg.notes.empty()) j["notes"] = cfg.notes;
  return j;
}

InstanceSpec build_preset_instance(const std::string& name, const json& params) {
  Params p(params, "instance.params");
  try {
    if (name == "fig1") {
      const auto k = p.u64("k", 20);
      const auto delay = p.u64("delay");
      const auto mean_seed = p.u64("mean_seed", 12061);
      p.finish();
      return make_fig1(static_cast<int>(k), delay, mean_seed);
    }
    if (name == "fig2") {
      const double delta = p.number("delta");
      const double alpha1 = p.number("alpha1", 1.0);
      const double alpha2 = p.number("alpha2", 0.2);
      p.finish();
      return make_pareto(delta, alpha1, alpha2);
    }
    if (name == "fig3") {
      const auto k = p.u64("k", 10);
      const double p_opt = p.number("p_opt", 0.1);
      const auto gap_seed = p.u64("gap_seed", 7551);
      p.finish();
      return make_packet_loss(static_cast<int>(k), p_opt, gap_seed);
    }
    if (name == "fig4") {
      const auto k = p.u64("k", 3);
      const auto d_big = p.u64("d_big", 5000);
      const auto gap_seed = p.u64("gap_seed", 3407);
      p.finish();
      return make_reward_dependent_bias(static_cast<int>(k), d_big, gap_seed);
    }
    if (name == "ucb-adv") {
      const auto k = p.u64("k", 10);
      const auto delay = p.u64("delay");
      const auto index_seed = p.u64("index_seed", 99);
      p.finish();
      return make_ucb_adversarial(static_cast<int>(k), delay, index_seed);
    }
    if (name == "dep-lower" || name == "dep-lower-i1" || name == "dep-lower-i2") {
      std::string variant = name == "dep-lower" ? p.text("variant")
                            : name == "dep-lower-i1" ? "i1"
                                                     : "i2";
      const double delta = p.number("delta");
      const auto d_tilde = p.u64("dtilde");
      p.finish();
      if (variant != "i1" && variant != "i2")
        throw ConfigError("instance.params.variant", "expected \"i1\" or \"i2\"");
      return make_dep_lower(variant == "i1" ? DepLowerVariant::kI1 : DepLowerVariant::kI2,
                            delta, d_tilde);
    }
    if (name == "twopoint") {
      const auto gaps = p.numbers("gaps");
      const auto d_tilde = p.u64("dtilde");
      const double q = p.number("q");
      const auto perm_seed = p.u64("perm_seed", 1);
      p.finish();
      return make_twopoint_lower(gaps, d_tilde, q, perm_seed);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("instance.params", e.what());
  }
  throw ConfigError("instance.preset", "unknown preset '" + name + "'");
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  const RadiusSpec experiment_radius{2.0, false};  // sqrt(2/n), the figures' radius
  const RadiusSpec theory_radius{2.0, true};       // sqrt(2 log T / n)

  if (name == "fig1") {
    cfg.instance = {"fig1", json{{"k", 20}, {"delay", 500}, {"mean_seed", 12061}}, {}};
    cfg.algorithms = {{"ucb", experiment_radius}, {"se", experiment_radius}};
    cfg.horizon = 20000;
    cfg.runs = 100;
    cfg.base_seed = 20201;
    cfg.checkpoint_every = 200;
    cfg.sweep = SweepSpec{"delay", {json(0), json(50), json(100), json(200), json(400), json(800)}};
    cfg.notes = {"delay sweep grid {0,50,100,200,400,800} is a reproduction choice",
                 "sweep horizon kept at T=2e4; pass --horizon 200000 for the long sweep"};
  } else if (name == "fig2") {
    cfg.instance = {"fig2", json{{"delta", 0.2}, {"alpha1", 1.0}, {"alpha2", 0.2}}, {}};
    cfg.algorithms = {{"se", theory_radius}};
    cfg.horizon = 3000;
    cfg.runs = 300;
    cfg.base_seed = 20202;
    cfg.checkpoint_every = 30;
    SweepSpec sweep{"delta", {}};
    for (int i = 1; i <= 15; ++i) sweep.values.push_back(json(0.04 * i));
    cfg.sweep = std::move(sweep);
  } else if (name == "fig3") {
    cfg.instance = {"fig3", json{{"k", 10}, {"p_opt", 0.1}, {"gap_seed", 7551}}, {}};
    cfg.algorithms = {{"se", theory_radius}, {"pse", theory_radius}};
    cfg.horizon = 20000;
    cfg.runs = 300;
    cfg.base_seed = 20203;
    cfg.checkpoint_every = 200;
    cfg.notes = {"optimal arm mean 0.6 (paper leaves the base mean unstated)",
                 "gaps drawn uniformly from [0.15, 0.25]"};
  } else if (name == "fig4") {
    cfg.instance = {"fig4", json{{"k", 3}, {"d_big", 5000}, {"gap_seed", 3407}}, {}};
    cfg.algorithms = {{"opse", experiment_radius},
                      {"ucb", experiment_radius},
                      {"se", experiment_radius}};
    cfg.horizon = 60000;
    cfg.runs = 100;
    cfg.base_seed = 20204;
    cfg.checkpoint_every = 600;
    cfg.notes = {"optimal arm mean 0.6 (paper leaves the base mean unstated)",
                 "plain SE included as the eliminates-the-best-arm control",
                 "confidence radius sqrt(2/n): with sqrt(2 log T/n) UCB explores widely "
                 "enough to recover from the bias and the figure does not reproduce"};
  } else if (name == "ucb-adv") {
    cfg.instance = {"ucb-adv", json{{"k", 10}, {"delay", 100}, {"index_seed", 99}}, {}};
    cfg.algorithms = {{"ucb", experiment_radius}, {"se", theory_radius}};
    cfg.horizon = 10000;
    cfg.runs = 200;
    cfg.base_seed = 20205;
    cfg.checkpoint_every = 100;
    cfg.sweep = SweepSpec{"delay", {json(100), json(200), json(400)}};
    cfg.notes = {"ucb runs the experiments' radius sqrt(2/n); with sqrt(2 log T/n) its "
                 "delay-independent exploration cost hides the delay scaling",
                 "se keeps the theory radius sqrt(2 log T/n)"};
  } else if (name == "dep-lower") {
    cfg.instance = {"dep-lower", json{{"variant", "i1"}, {"delta", 0.1}, {"dtilde", 2500}}, {}};
    cfg.algorithms = {{"opse", theory_radius}, {"se", theory_radius}};
    cfg.horizon = 5000;
    cfg.runs = 200;
    cfg.base_seed = 20206;
    cfg.checkpoint_every = 50;
    cfg.sweep = SweepSpec{"variant", {json("i1"), json("i2")}};
    cfg.notes = {"delta=0.1, dtilde=T/2 are demonstration parameters, not paper values"};
  } else {
    throw ConfigError("experiment", "unknown preset '" + name + "'");
  }
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "fig4", "ucb-adv", "dep-lower"};
}

int default_thread_count() {
  if (const char* env = std::getenv("DMAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::uint64_t n, int threads, const std::function<void(std::uint64_t)>& fn) {
  if (threads < 1) threads = 1;
  if (threads == 1 || n <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::uint64_t>(n, threads));
  pool.reserve(count);
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads) {
  std::vector<std::pair<std::string, InstanceSpec>> cells;
  if (cfg.sweep) {
    for (const auto& value : cfg.sweep->values) {
      json params = cfg.instance.params.is_null() ? json::object() : cfg.instance.params;
      params[cfg.sweep->param] = value;
      auto inst = build_preset_instance(cfg.instance.preset, params);
      cells.emplace_back(sweep_label(inst.name, cfg.sweep->param, value), std::move(inst));
    }
  } else if (cfg.instance.inline_spec) {
    cells.emplace_back(cfg.instance.inline_spec->name, *cfg.instance.inline_spec);
  } else {
    auto inst = build_preset_instance(cfg.instance.preset, cfg.instance.params);
    cells.emplace_back(inst.name, std::move(inst));
  }

  ExperimentResult result;
  json cell_summaries = json::array();
  for (auto& [label, inst] : cells) {
    if (cfg.horizon < static_cast<std::uint64_t>(inst.num_arms()))
      throw ConfigError("T", "horizon must be at least the number of arms");
    CellResult cell;
    cell.label = label;
    cell.instance = inst;
    json algo_summaries = json::array();
    for (const auto& algo : cfg.algorithms) {
      std::vector<RunRecord> records(cfg.runs);
      parallel_for(cfg.runs, threads, [&](std::uint64_t j) {
        records[j] = simulate_run(inst, algo.name, algo.radius, cfg.horizon,
                                  mix_seed(cfg.base_seed, j), cfg.checkpoint_every,
                                  cfg.record_actions);
        records[j].instance = label;
      });
      auto agg = aggregate(records);
      json algo_summary{{"name", algo.name},
                        {"final_mean", agg.mean.back()},
                        {"final_stderr", agg.stderr_.back()},
                        {"runs", agg.runs},
                        {"eliminated_optimal_rate", agg.eliminated_optimal_rate}};
      append_bounds(algo_summary, algo.name, inst, cfg.horizon);
      algo_summaries.push_back(std::move(algo_summary));
      cell.runs_per_algorithm.push_back(std::move(records));
      cell.aggregates.push_back(std::move(agg));
    }
    cell_summaries.push_back(json{{"instance", cell.label}, {"algorithms", algo_summaries}});
    result.cells.push_back(std::move(cell));
  }
  result.summary = json{{"T", cfg.horizon},
                        {"runs", cfg.runs},
                        {"base_seed", cfg.base_seed},
                        {"cells", std::move(cell_summaries)}};
  return result;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(out_dir) / name);
    if (!out) throw IoError("cannot write " + (fs::path(out_dir) / name).string());
    return out;
  };

  {
    auto out = open("runs.csv");
    out << "instance,algorithm,seed,round,cum_regret\n";
    for (const auto& cell : result.cells)
      for (const auto& records : cell.runs_per_algorithm)
        for (const auto& r : records)
          for (std::size_t p = 0; p < r.checkpoints.size(); ++p)
            out << r.instance << ',' << r.algorithm << ',' << r.seed << ','
                << r.checkpoints[p] << ',' << format_float(r.regret_curve[p]) << '\n';
  }
  {
    auto out = open("aggregate.csv");
    std::vector<Aggregate> all;
    for (const auto& cell : result.cells)
      for (const auto& agg : cell.aggregates) all.push_back(agg);
    write_aggregates_csv(out, all);
  }
  {
    auto out = open("summary.json");
    out << result.summary.dump(2) << '\n';
  }
  {
    auto out = open("config.json");
    out << to_json(cfg).dump(2) << '\n';
  }
}

}  // namespace dmab
