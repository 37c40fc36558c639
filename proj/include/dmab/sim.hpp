#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "dmab/agents.hpp"
#include "dmab/environment.hpp"
#include "dmab/instances.hpp"
#include "dmab/metrics.hpp"
#include "dmab/rng.hpp"

// One seeded agent-vs-environment run of the round protocol. The hook fires
// after each round's observe() with full access to environment and agent;
// instrumentation-free callers pass NoHook and pay nothing.

namespace dmab {

struct NoHook {
  void operator()(const Environment&, const Agent&, std::uint64_t /*t*/, int /*arm*/) const {}
};

template <class Hook = NoHook>
RunRecord simulate_run(const InstanceSpec& instance, const std::string& algorithm,
                       RadiusSpec radius, std::uint64_t horizon, std::uint64_t seed,
                       std::uint64_t checkpoint_every, bool record_actions = false,
                       Hook&& hook = Hook{}) {
  auto agent = make_agent(algorithm);
  agent->reset(instance.num_arms(), horizon, radius, mix_seed(seed, 1));
  Environment env(instance.arms, instance.gaps, horizon, mix_seed(seed, 0));

  RunRecord rec;
  rec.instance = instance.name;
  rec.algorithm = algorithm;
  rec.seed = seed;
  rec.checkpoints = checkpoint_rounds(horizon, checkpoint_every);
  rec.regret_curve.reserve(rec.checkpoints.size());
  if (record_actions) rec.actions.reserve(horizon);

  std::size_t next_cp = 0;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const int arm = agent->choose(t);
    const auto& events = env.step(arm);
    agent->observe(events);
    hook(env, *agent, t, arm);
    if (record_actions) rec.actions.push_back(arm);
    if (t == rec.checkpoints[next_cp]) {
      rec.regret_curve.push_back(env.pseudo_regret());
      ++next_cp;
    }
  }

  rec.final_pulls = agent->counts().pulls;
  rec.final_observations = agent->counts().observations;
  rec.eliminated_optimal = !agent->is_active(instance.optimal_arm);
  return rec;
}

}  // namespace dmab
