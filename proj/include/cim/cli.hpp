#pragma once

#include <string>
#include <vector>

namespace cim::cli {

/// Entry point for the `cim` tool. Returns the process exit code; on failure
/// prints a single machine-parsable line `error: <category>: <message>` to
/// stderr.
int run(const std::vector<std::string>& args);

}  // namespace cim::cli
