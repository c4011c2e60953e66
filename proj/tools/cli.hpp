#pragma once

#include <string>
#include <vector>

namespace hawkes_ls::cli {

/// Exit codes: 0 ok, 1 usage or parse error, 2 invalid model, 3 runtime budget.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitModel = 2;
inline constexpr int kExitBudget = 3;

/// Entry point of the hawkes_ls executable.
int run_cli(int argc, char** argv);

/// Same, from an argument list without the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace hawkes_ls::cli
