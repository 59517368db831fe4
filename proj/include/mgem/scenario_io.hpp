#pragma once

#include <filesystem>
#include <string>

#include "mgem/scenario.hpp"

namespace mgem {

/// Parses a scenario document (schema in docs/scenario-format.md) and
/// validates it. Throws ScenarioError on malformed input and ValidationError
/// when an invariant fails.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes in cents with round-trip exact number formatting.
std::string dump_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// A builtin name, or else a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace mgem
