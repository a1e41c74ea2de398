#pragma once

// The acceptance battery: one pass/fail verdict per criterion, with the
// tolerances fixed here rather than taken from the caller.

#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "smab/rng.hpp"

namespace smab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::set<int> only;  // empty: all criteria
  int jobs = 0;
  Seed seed = 20240601;
};

/// Runs the selected criteria, printing one PASS/FAIL line per criterion to
/// `log` as each finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log);

std::vector<std::pair<int, std::string>> acceptance_criteria();

}  // namespace smab
