#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hybridctl::frontend {

/// Exit codes: 0 success, 1 numerical or runtime failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hybridctl::frontend
