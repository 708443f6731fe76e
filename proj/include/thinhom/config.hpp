#ifndef THINHOM_CONFIG_HPP
#define THINHOM_CONFIG_HPP

#include "thinhom/study.hpp"

#include <json.hpp>

#include <string>

namespace thinhom {

/// Reads and validates a JSON study configuration (see configs/reference.json).
/// Throws ConfigError naming the offending field.
StudyConfig parse_config(const std::string& path);
StudyConfig parse_config_text(const std::string& text);

StudyConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const StudyConfig& config);

} // namespace thinhom

#endif // THINHOM_CONFIG_HPP
