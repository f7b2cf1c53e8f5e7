#pragma once

#include <istream>
#include <map>
#include <string>

#include "awd3/agents.hpp"

namespace awd3 {

/// The line-based key=value representation of AgentConfig shared by config
/// files, run manifests and checkpoints. Keys are the field names.
std::map<std::string, std::string> config_to_map(const AgentConfig& cfg);

/// Applies one key=value pair; ConfigError on unknown key or unparsable value.
void apply_config_entry(AgentConfig& cfg, const std::string& key,
                        const std::string& value);

/// Parses "key = value" lines; blank lines and '#' comments are skipped.
std::map<std::string, std::string> parse_config_text(std::istream& in);

std::string config_to_text(const AgentConfig& cfg);
AgentConfig config_from_text(const std::string& text);

} // namespace awd3
