#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "isho/core/config.hpp"

namespace isho {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Delays are written in milliseconds; everything else in natural units.
nlohmann::json to_json(const RunConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config_file(const std::string& path);

// Applies "a.b=value" to a JSON tree. The value is parsed as JSON when it
// parses, otherwise taken as a string. The key must already exist.
void apply_override(nlohmann::json& tree, std::string_view assignment);
void set_path(nlohmann::json& tree, std::string_view path, nlohmann::json value);

}  // namespace isho
