#pragma once

#include <string>
#include <vector>

#include "swta/error.hpp"

namespace swta {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kData = 3, kInternal = 4 };

int exit_code_for(ErrorKind kind);

/// Entry point of the `swta` tool: train | recall | experiment | sweep.
/// Diagnostics go to stderr as a single line; returns the process exit code.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace swta
