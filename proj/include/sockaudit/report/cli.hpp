#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sockaudit::report {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailures = 1;
inline constexpr int kExitConfigError = 2;

// Subcommands: run, evaluate, classify, train, kappa, compare.
// Global flags: --seed, --workers, --output, --config.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace sockaudit::report
