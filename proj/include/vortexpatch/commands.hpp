#pragma once

#include <filesystem>

#include "vortexpatch/config.hpp"

namespace vpl {

/// Exit codes shared by the CLI subcommands.
enum ExitCode {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitConvergenceFailure = 3,
  kExitBlowUp = 4,
  kExitOracleFailure = 5,
};

int cmd_solve(const Config& cfg, const std::filesystem::path& out_dir);
int cmd_evolve(const Config& cfg, const std::filesystem::path& out_dir);
int cmd_stability(const Config& cfg, const std::filesystem::path& out_dir, int threads);
int cmd_oracle(const Config& cfg, const std::filesystem::path& out_dir);

}  // namespace vpl
