#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using smab::cli::parse_and_dispatch;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = parse_and_dispatch(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("smab_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("run writes results and exits cleanly") {
  const auto dir = scratch("run");
  const auto o = run({"run", "--n", "9", "--m", "8", "--T", "5000", "--reps", "3", "--instance",
                      "gap", "--jobs", "1", "--out", dir.string()});
  CHECK(o.code == smab::cli::kOk);
  CHECK(fs::exists(dir / "results.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(o.out.find("large-general") != std::string::npos);
}

TEST_CASE("configuration errors exit with code 1") {
  const auto dir = scratch("bad");
  const auto o = run({"run", "--n", "9", "--m", "1", "--out", dir.string()});
  CHECK(o.code == smab::cli::kConfigError);
  CHECK(o.err.find("memory m must be >= 2") != std::string::npos);
  CHECK(run({"run", "--frobnicate"}).code == smab::cli::kConfigError);
  CHECK(run({}).code == smab::cli::kConfigError);
  CHECK(run({"run", "--n", "9,18", "--out", dir.string()}).code == smab::cli::kConfigError);
  CHECK(run({"run", "--set", "colour=blue", "--out", dir.string()}).code ==
        smab::cli::kConfigError);
  CHECK(run({"run", "--alg", "greedy", "--out", dir.string()}).code == smab::cli::kConfigError);
  CHECK(run({"run", "--config", (dir / "missing.json").string()}).code ==
        smab::cli::kConfigError);
}

TEST_CASE("config file with flag and override precedence") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "exp.json");
    cfg << R"({"n": [9], "m": [8], "T": [4000], "reps": 50, "instance": "gap"})";
  }
  const auto o = run({"run", "--config", (dir / "exp.json").string(), "--reps", "4", "--set",
                      "T=3000", "--jobs", "1", "--out", dir.string()});
  CHECK(o.code == smab::cli::kOk);
  std::ifstream csv(dir / "results.csv");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    if (line.find(",large-general,") != std::string::npos) {
      ++rows;
      CHECK(line.find(",3000,") != std::string::npos);
    }
  }
  CHECK(rows == 4);
}

TEST_CASE("sweep plots regret against the horizon") {
  const auto dir = scratch("sweep");
  const auto o = run({"sweep", "--n", "9", "--m", "8", "--T", "2000,4000,8000", "--reps", "2",
                      "--instance", "gap", "--jobs", "1", "--out", dir.string()});
  CHECK(o.code == smab::cli::kOk);
  REQUIRE(fs::exists(dir / "regret.svg"));
  std::ifstream svg(dir / "regret.svg");
  const std::string text((std::istreambuf_iterator<char>(svg)), {});
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(o.out.find("fit ") != std::string::npos);
}

TEST_CASE("bai and bar subcommands") {
  const auto dir = scratch("standalone");
  const auto b = run({"bai", "--n", "50", "--m", "3", "--eps", "0.1", "--levels", "2", "--reps",
                      "2", "--jobs", "1", "--out", dir.string()});
  CHECK(b.code == smab::cli::kOk);
  CHECK(b.out.find("output gap") != std::string::npos);
  const auto r = run({"bar", "--n", "18", "--m", "16", "--eps0", "0.5", "--eps1", "0.2", "--reps",
                      "2", "--jobs", "1", "--out", dir.string()});
  CHECK(r.code == smab::cli::kOk);
  CHECK(run({"bar", "--n", "18", "--m", "16", "--eps0", "1.5", "--out", dir.string()}).code ==
        smab::cli::kConfigError);
}

TEST_CASE("fuzz and accept subcommands") {
  const auto f = run({"fuzz", "--configs", "50", "--jobs", "1"});
  CHECK(f.code == smab::cli::kOk);
  CHECK(f.out.find("0 violations") != std::string::npos);
  const auto a = run({"accept", "--only", "9", "--jobs", "1"});
  CHECK(a.code == smab::cli::kOk);
  CHECK(a.out.find("PASS C9") != std::string::npos);
}
