#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ifm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,     // bad flags, invalid config, domain errors in inputs
  kExitIo = 3,        // unreadable or unwritable files
  kExitAnalysis = 4,  // analysis could not find the requested feature
};

// Environment variable that redirects relative output paths.
inline constexpr const char* kOutputDirEnv = "IFM_OUTPUT_DIR";

// Runs the command line `args` (without the program name). Normal output
// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Relative paths are placed under $IFM_OUTPUT_DIR when it is set.
std::filesystem::path resolve_output(const std::filesystem::path& p);

}  // namespace ifm::cli
