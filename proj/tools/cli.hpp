#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ldrate::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;         // unexpected internal failure
inline constexpr int kExitConfig = 2;        // malformed config or violated precondition
inline constexpr int kExitA4 = 3;            // limit domains differ
inline constexpr int kExitInconclusive = 4;  // Monte Carlo data censored
inline constexpr int kExitMcFail = 5;        // Monte Carlo estimate outside tolerance

// Runs one command; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ldrate::cli
