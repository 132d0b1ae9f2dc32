#pragma once

#include <filesystem>
#include <string>

#include "vcmd/pipeline.hpp"

namespace vcmd {

/// Parses a run configuration from JSON. Every parameter is optional and
/// defaults are the documented values; unknown keys and wrong types are
/// rejected with the offending key named.
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Stable-key-order JSON echo of a configuration.
std::string run_config_to_json(const RunConfig& cfg);

} // namespace vcmd
