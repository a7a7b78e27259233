#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rosgns::cli {

// Stable process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kNumericalAbort = 3,
};

// Hyperparameters used when --step / --iters are not given.
struct StepSchedule {
  double step_size;
  int iterations;
};
StepSchedule default_schedule(int dimension);

// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::string& path);

}  // namespace rosgns::cli
