#pragma once

#include <string>

#include "qc/network.hpp"

namespace qc {

// Flat `key = value` configuration files with `#` comments.  Every key is
// optional; missing keys keep the defaults of NetworkConfig.  Unknown keys
// are an error.
NetworkConfig load_config(const std::string& path);

// Applies one `key = value` assignment to cfg (shared by file loading and
// CLI overrides).  Throws std::invalid_argument for unknown keys or
// malformed values.
void apply_config_entry(NetworkConfig& cfg, const std::string& key,
                        const std::string& value);

// Serializes every effective setting, in fixed order, with full float
// precision.  Loading the echo reproduces the run bit for bit.
std::string config_echo(const NetworkConfig& cfg);
void write_config_echo(const NetworkConfig& cfg, const std::string& path);

const char* to_string(AmplitudeVariant v);
const char* to_string(DriftTimeScaling s);

} // namespace qc
