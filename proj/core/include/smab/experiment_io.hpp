#pragma once

// Flat JSON experiment configs and key=value overrides.

#include <string>

#include "smab/harness.hpp"

namespace smab {

/// Canonical JSON with every key, including schema_version.
std::string experiment_to_json(const Experiment& exp);

/// Rejects unknown keys and wrongly typed values (ConfigError naming the key).
/// Missing keys keep their defaults.
Experiment experiment_from_json(const std::string& text);

/// Applies one "key=value" override, type-checked against the schema.
/// List keys (n, m, P, T) take comma-separated values.
void apply_override(Experiment& exp, const std::string& assignment);

}  // namespace smab
