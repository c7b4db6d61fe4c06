#pragma once

#include <string>
#include <vector>

#include "nad/error.hpp"

namespace nad::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitArgument = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitValidation = 4;
inline constexpr int kExitNumerical = 5;
inline constexpr int kExitOracle = 6;

int exit_code_for(Errc code);

// Runs one invocation; `args` excludes the program name. Logs and errors go to stderr
// as JSON lines.
int run(const std::vector<std::string>& args);

}  // namespace nad::cli
