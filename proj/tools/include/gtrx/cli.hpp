#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gtrx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. `args` excludes the program name. Data goes to `out`,
/// logs and the JSON error report to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Same, using std::cout and std::cerr.
int run(const std::vector<std::string>& args);

}  // namespace gtrx::cli
