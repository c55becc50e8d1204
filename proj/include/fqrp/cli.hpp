#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fqrp::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kUsage = 2, kNumerical = 3, kIo = 4 };

/// Runs the command line; args excludes the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fqrp::cli
