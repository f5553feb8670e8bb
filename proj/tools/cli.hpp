#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace phasestar::cli {

enum ExitCode : int { kPass = 0, kIdentityFailure = 1, kInputError = 2, kNumericalAbort = 3 };

// Full command-line entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasestar::cli
