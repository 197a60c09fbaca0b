#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace botsift::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kDataIntegrity = 3,
};

/// Runs the command line `args` (args[0] is the program name). Normal
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace botsift::cli
