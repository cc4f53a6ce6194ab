#pragma once

#include <string>

#include <json.hpp>

#include "dqe/augment.hpp"
#include "dqe/net/config.hpp"

namespace dqe {

// JSON (de)serialization for the structured configs. from_json is strict:
// unknown keys are rejected so a typo in a run config cannot pass silently.
nlohmann::json augment_to_json(const AugmentConfig& c);
AugmentConfig augment_from_json(const nlohmann::json& j);

nlohmann::json train_config_to_json(const net::TrainConfig& c);
net::TrainConfig train_config_from_json(const nlohmann::json& j);

void check_known_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                      const std::string& context);

}  // namespace dqe
