#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace holo::cli {

enum ExitCode : int { kExitPass = 0, kExitValidation = 2, kExitCheckFailed = 3, kExitIo = 4 };

struct RunOptions {
  std::string command;
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<double> step;
  std::optional<int> order;
  bool oracle = false;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

const std::vector<std::string>& command_names();

// Runs one command (or `all`), writes <command>.csv and <command>.json into out_dir, and returns the exit code.
// Diagnostics go to `log`.
int run(const RunOptions& options, std::ostream& log);

}  // namespace holo::cli
