#include "dmab/serialize.hpp"

#include <stdexcept>

namespace dmab {

using nlohmann::json;

namespace {

void expect(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

json to_json(const RewardDist& dist) {
  if (dist.kind() == RewardDist::Kind::kBernoulli)
    return json{{"kind", "bernoulli"}, {"p", dist.param()}};
  return json{{"kind", "point_mass"}, {"v", dist.param()}};
}

RewardDist reward_from_json(const json& j) {
  expect(j.is_object() && j.contains("kind"), "reward: expected object with a kind");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "bernoulli") return RewardDist::bernoulli(j.at("p").get<double>());
  if (kind == "point_mass") return RewardDist::point_mass(j.at("v").get<double>());
  throw std::invalid_argument("reward.kind: unknown value '" + kind + "'");
}

json to_json(const DelayDist& dist) {
  switch (dist.kind()) {
    case DelayDist::Kind::kFixed:
      return json{{"kind", "fixed"}, {"d", dist.fixed_value()}};
    case DelayDist::Kind::kPacketLoss:
      return json{{"kind", "packet_loss"}, {"p", dist.prob_param()}};
    case DelayDist::Kind::kTwoPoint:
      return json{{"kind", "two_point"}, {"d", dist.fixed_value()}, {"q", dist.prob_param()}};
    case DelayDist::Kind::kPareto:
      return json{{"kind", "pareto"}, {"alpha", dist.alpha()}};
    case DelayDist::Kind::kTable: {
      json entries = json::array();
      for (const auto& e : dist.entries()) {
        json entry;
        if (e.delay.is_infinite())
          entry["delay"] = "inf";
        else
          entry["delay"] = e.delay.value();
        entry["p"] = e.prob;
        entries.push_back(std::move(entry));
      }
      return json{{"kind", "table"}, {"entries", std::move(entries)}};
    }
  }
  throw std::logic_error("unreachable delay kind");
}

DelayDist delay_from_json(const json& j) {
  expect(j.is_object() && j.contains("kind"), "delay: expected object with a kind");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "fixed") return DelayDist::fixed(j.at("d").get<std::uint64_t>());
  if (kind == "packet_loss") return DelayDist::packet_loss(j.at("p").get<double>());
  if (kind == "two_point")
    return DelayDist::two_point(j.at("d").get<std::uint64_t>(), j.at("q").get<double>());
  if (kind == "pareto") return DelayDist::pareto(j.at("alpha").get<double>());
  if (kind == "table") {
    std::vector<DelayDist::TableEntry> entries;
    expect(j.contains("entries") && j.at("entries").is_array(),
           "delay.entries: expected an array");
    for (const auto& e : j.at("entries")) {
      ExtendedDelay d = ExtendedDelay::finite(0);
      if (e.at("delay").is_string()) {
        expect(e.at("delay").get<std::string>() == "inf",
               "delay.entries[].delay: expected a natural number or \"inf\"");
        d = ExtendedDelay::infinity();
      } else {
        d = ExtendedDelay::finite(e.at("delay").get<std::uint64_t>());
      }
      entries.push_back({d, e.at("p").get<double>()});
    }
    return DelayDist::table(std::move(entries));
  }
  throw std::invalid_argument("delay.kind: unknown value '" + kind + "'");
}

json to_json(const ArmModel& arm) {
  json out{{"reward", to_json(arm.reward())}};
  if (arm.reward_independent()) {
    out["delay"] = to_json(arm.conditionals().front().second);
  } else {
    json cond = json::array();
    for (const auto& [r, dist] : arm.conditionals())
      cond.push_back(json{{"reward", r}, {"delay", to_json(dist)}});
    out["delay_given_reward"] = std::move(cond);
  }
  return out;
}

ArmModel arm_from_json(const json& j) {
  expect(j.is_object() && j.contains("reward"), "arm: expected object with a reward");
  auto reward = reward_from_json(j.at("reward"));
  if (j.contains("delay")) return ArmModel::independent(std::move(reward), delay_from_json(j.at("delay")));
  expect(j.contains("delay_given_reward"),
         "arm: needs either delay or delay_given_reward");
  std::vector<std::pair<double, DelayDist>> conditional;
  for (const auto& e : j.at("delay_given_reward"))
    conditional.emplace_back(e.at("reward").get<double>(), delay_from_json(e.at("delay")));
  return ArmModel::reward_dependent(std::move(reward), std::move(conditional));
}

json to_json(const InstanceSpec& spec) {
  json arms = json::array();
  for (const auto& arm : spec.arms) arms.push_back(to_json(arm));
  return json{{"name", spec.name},
              {"arms", std::move(arms)},
              {"optimal_arm", spec.optimal_arm},
              {"provenance", spec.provenance}};
}

InstanceSpec instance_from_json(const json& j) {
  expect(j.is_object() && j.contains("arms") && j.at("arms").is_array(),
         "instance: expected object with an arms array");
  std::vector<ArmModel> arms;
  for (const auto& a : j.at("arms")) arms.push_back(arm_from_json(a));
  auto spec = finish_instance(j.value("name", std::string("inline")), std::move(arms),
                              j.value("provenance", std::string()));
  if (j.contains("optimal_arm")) {
    expect(j.at("optimal_arm").get<int>() == spec.optimal_arm,
           "instance.optimal_arm: inconsistent with arm means");
  }
  return spec;
}

}  // namespace dmab
