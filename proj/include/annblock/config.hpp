#pragma once

#include <string>

#include "annblock/blocker.hpp"

namespace annblock {

/// Parses a TOML config with [text], [ann], [ann.hnsw] and [ann.lsh]
/// tables into a RunConfig, starting from the defaults. Unknown tables or
/// keys are rejected, not ignored.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

}  // namespace annblock
