#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dinicert::cli {

// Exit codes shared by every subcommand.
inline constexpr int kCertified = 0;
inline constexpr int kWitness = 0;
inline constexpr int kRejected = 1;
inline constexpr int kInconclusive = 2;
inline constexpr int kMultipliers = 3;
inline constexpr int kUsage = 64;
inline constexpr int kFileError = 66;
inline constexpr int kInternal = 70;

/// Runs one command. `args` excludes the program name. The summary goes to
/// `out`, diagnostics to `err`; stdout never contains timings.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace dinicert::cli
