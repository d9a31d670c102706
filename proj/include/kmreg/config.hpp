#pragma once

#include <string>

#include "kmreg/harness.hpp"

namespace kmreg::config {

inline constexpr int kSchemaVersion = 1;

/// Parses a JSON experiment document. Unknown keys and out-of-range physical
/// parameters raise ConfigError.
ExperimentConfig parse(const std::string& text);

/// Reads and parses a file. An unreadable file raises ConfigError.
ExperimentConfig load(const std::string& path);

/// Serializes back to the JSON schema accepted by parse().
std::string dump(const ExperimentConfig& config);

}  // namespace kmreg::config
