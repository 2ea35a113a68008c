#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dda::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitValidation = 3,
  kExitInternal = 4,
};

/// Output directories default to this variable when set, else ".".
inline constexpr const char* kOutputDirEnv = "DDATOOL_OUTPUT_DIR";

/// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace dda::cli
