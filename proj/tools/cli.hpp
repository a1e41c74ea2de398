#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace smab::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kRefereeViolation = 2,
  kAcceptanceFailure = 3,
};

/// `args` excludes the program name. Output files go under --out (default ".").
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smab::cli
