#pragma once

#include <json.hpp>

#include "dmab/distributions.hpp"
#include "dmab/instances.hpp"

// JSON round-tripping for reward laws, delay laws, arm models and instances.
// The same schema is used by preset emission and hand-written configs.

namespace dmab {

nlohmann::json to_json(const RewardDist& dist);
RewardDist reward_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DelayDist& dist);
DelayDist delay_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ArmModel& arm);
ArmModel arm_from_json(const nlohmann::json& j);

nlohmann::json to_json(const InstanceSpec& spec);
InstanceSpec instance_from_json(const nlohmann::json& j);

}  // namespace dmab
