#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmorph {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs the command line `args` (args[0] is the program name) and returns the
/// process exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmorph
