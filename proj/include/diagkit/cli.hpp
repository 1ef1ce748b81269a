#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace diagkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitCertificate = 4;

/// Runs one command; `args` excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace diagkit::cli
