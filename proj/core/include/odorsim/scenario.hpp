#pragma once

#include <odorsim/sim.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odorsim::scenario {

inline constexpr int kSchemaVersion = 1;

/// Names of the built-in scenarios: paper_consensus, paper_formation,
/// no_disturbance, pso_comparison.
std::vector<std::string> canned_names();

/// JSON text of a built-in scenario, or nullopt for an unknown name.
std::optional<std::string> canned_scenario(std::string_view name);

struct LoadedScenario {
  sim::SimConfig config;
  /// Fully resolved configuration (defaults + file + overrides), sorted keys.
  std::string canonical_json;
  /// FNV-1a 64 of canonical_json.
  std::uint64_t hash = 0;
};

/// Parses a scenario document. Missing keys take documented defaults,
/// unknown keys are rejected, and `overrides` ("dotted.key=value", value
/// parsed as JSON when possible) are applied last. A run manifest (object
/// with a "config" member) is accepted as well. Throws sim::ConfigError.
/// `structural_checks` = false skips the H nonsingularity test so that a
/// topology can be diagnosed rather than rejected.
LoadedScenario load_scenario(std::string_view json_text,
                             const std::vector<std::string>& overrides = {},
                             bool structural_checks = true);

/// Returns the built-in scenario text for a canned name, otherwise the
/// contents of the file at `name_or_path`. Throws sim::ConfigError("config").
std::string resolve_scenario_text(const std::string& name_or_path);

/// Default document with every key present.
std::string default_scenario_json();

std::uint64_t fnv1a64(std::string_view data);

}  // namespace odorsim::scenario
