// Acceptance battery driver: `smab_acceptance [--only N]... [--jobs J] [--seed S]`.
#include <cstdlib>
#include <iostream>
#include <string>

#include "smab/acceptance.hpp"

int main(int argc, char** argv) {
  smab::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (i + 1 < argc && arg == "--only") {
      options.only.insert(std::atoi(argv[++i]));
    } else if (i + 1 < argc && arg == "--jobs") {
      options.jobs = std::atoi(argv[++i]);
    } else if (i + 1 < argc && arg == "--seed") {
      options.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (arg == "--list") {
      for (const auto& [id, name] : smab::acceptance_criteria()) std::cout << id << " " << name << "\n";
      return 0;
    } else {
      std::cerr << "usage: smab_acceptance [--only N]... [--jobs J] [--seed S] [--list]\n";
      return 2;
    }
  }
  const auto results = smab::run_acceptance(options, std::cout);
  bool ok = !results.empty();
  for (const auto& r : results) ok = ok && r.passed;
  return ok ? 0 : 1;
}
