#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "smab/acceptance.hpp"
#include "smab/errors.hpp"
#include "smab/experiment_io.hpp"
#include "smab/harness.hpp"

namespace smab::cli {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string alg, instance, n, m, passes, horizon;
  int reps = 0;
  long long seed = -1;
  int jobs = 0;
  bool explore_only = false;
  std::string out;
  std::vector<std::string> sets;
  // bai / bar extras
  double eps = -1, eps0 = -1, eps1 = -1, delta = -1;
  int levels = -1;
  // accept / fuzz
  std::vector<int> only;
  int configs = 10000;
};

void add_experiment_flags(CLI::App* cmd, Flags& f, bool lists) {
  const std::string grid = lists ? " (comma-separated list)" : "";
  cmd->add_option("--config", f.config, "JSON experiment file");
  cmd->add_option("--alg", f.alg, "auto, large-simple, large-general, small, uniform, bai, bar");
  cmd->add_option("--instance", f.instance, "hard-worst, hard, h0, gap, gap-last, random");
  cmd->add_option("--n", f.n, "arm count" + grid);
  cmd->add_option("--m", f.m, "memory slots" + grid);
  cmd->add_option("--P", f.passes, "passes" + grid);
  cmd->add_option("--T", f.horizon, "horizon" + grid);
  cmd->add_option("--reps", f.reps, "repetitions per grid point");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--jobs", f.jobs, "worker threads (default: SMAB_JOBS or all cores)");
  cmd->add_flag("--explore-only", f.explore_only, "stop after the last pass");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--set", f.sets, "config override key=value")->take_all();
  cmd->add_option("--delta", f.delta, "confidence parameter");
}

// Precedence: defaults, then --config, then dedicated flags, then --set.
Experiment resolve(const Flags& f, bool lists) {
  Experiment e;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config file '" + f.config + "'");
    e = experiment_from_json(std::string(std::istreambuf_iterator<char>(in), {}));
  }
  auto grid = [&](const char* key, const std::string& value) {
    if (value.empty()) return;
    if (!lists && value.find(',') != std::string::npos) {
      throw ConfigError(std::string("--") + key + " takes a single value here; use sweep for lists");
    }
    apply_override(e, std::string(key) + "=" + value);
  };
  if (!f.alg.empty()) e.algorithm = f.alg;
  if (!f.instance.empty()) e.instance = f.instance;
  grid("n", f.n);
  grid("m", f.m);
  grid("P", f.passes);
  grid("T", f.horizon);
  if (f.reps != 0) e.reps = f.reps;
  if (f.seed >= 0) e.seed = static_cast<Seed>(f.seed);
  if (f.jobs != 0) e.jobs = f.jobs;
  if (f.explore_only) e.explore_only = true;
  if (!f.out.empty()) e.out = f.out;
  if (f.eps >= 0) e.eps = f.eps;
  if (f.eps0 >= 0) e.eps0 = f.eps0;
  if (f.eps1 >= 0) e.eps1 = f.eps1;
  if (f.delta >= 0) e.delta = f.delta;
  if (f.levels >= 0) e.levels = f.levels;
  for (const auto& s : f.sets) apply_override(e, s);
  if (e.algorithm != "auto") parse_algorithm(e.algorithm);
  return e;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path.string() + "'");
  file << text;
}

std::string svg_of(const Summary& s) {
  std::map<std::string, Series> by_group;
  for (const auto& p : s.points) {
    const auto& g = p.point;
    const std::string label = to_string(g.algorithm) + " n=" + std::to_string(g.n) +
                              " m=" + std::to_string(g.m) + " P=" + std::to_string(g.passes);
    auto& series = by_group[label];
    series.label = label;
    series.points.emplace_back(double(g.horizon), p.regret.mean);
  }
  std::vector<Series> series;
  for (auto& [label, sr] : by_group) series.push_back(std::move(sr));
  return svg_loglog("mean pseudo-regret vs T", "T", "regret", series);
}

void print_points(const Summary& s, std::ostream& out) {
  char line[256];
  for (const auto& p : s.points) {
    const auto& g = p.point;
    std::snprintf(line, sizeof line, "%-13s n=%-3d m=%-3d P=%d T=%-10lld regret %.3f (se %.3f)",
                  to_string(g.algorithm).c_str(), g.n, g.m, g.passes,
                  static_cast<long long>(g.horizon), p.regret.mean, p.regret.se);
    out << line;
    if (p.output_gap) {
      std::snprintf(line, sizeof line, " output gap %.5f", p.output_gap->mean);
      out << line;
    }
    if (p.violations) out << " violations " << p.violations;
    out << "\n";
  }
  for (const auto& f : s.fits) {
    std::snprintf(line, sizeof line, "fit %s n=%d m=%d P=%d: slope %.4f (se %.4f), target %.4f",
                  to_string(f.algorithm).c_str(), f.n, f.m, f.passes, f.fit.slope, f.fit.stderr_,
                  f.target);
    out << line << "\n";
  }
  for (const auto& w : s.warnings) out << "warning: " << w << "\n";
}

int run_experiment(const Experiment& e, bool plot, std::ostream& out) {
  const Summary s = simulate(e);
  const fs::path dir = e.out.empty() ? fs::path(".") : fs::path(e.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_file(dir / "results.csv", summary_csv(s));
  write_file(dir / "summary.json", summary_json(s));
  if (plot) write_file(dir / "regret.svg", svg_of(s));
  print_points(s, out);
  out << "wrote " << (dir / "results.csv").string() << ", " << (dir / "summary.json").string()
      << (plot ? ", " + (dir / "regret.svg").string() : "") << "\n";
  int violations = 0;
  for (const auto& p : s.points) violations += p.violations;
  return violations ? kRefereeViolation : kOk;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming multi-armed bandit experiments"};
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "simulate one grid point");
  add_experiment_flags(run, f, false);
  auto* sweep = app.add_subcommand("sweep", "simulate a grid and plot regret against T");
  add_experiment_flags(sweep, f, true);
  auto* bai = app.add_subcommand("bai", "standalone best-arm identification");
  add_experiment_flags(bai, f, false);
  bai->add_option("--eps", f.eps, "accuracy");
  bai->add_option("--levels", f.levels, "level count r (0: automatic)");
  auto* bar = app.add_subcommand("bar", "offline best-arm retention");
  add_experiment_flags(bar, f, false);
  bar->add_option("--eps0", f.eps0, "first-stage accuracy");
  bar->add_option("--eps1", f.eps1, "second-stage accuracy");

  AcceptanceOptions acc;
  long long acc_seed = -1;
  auto* accept = app.add_subcommand("accept", "run the acceptance battery");
  accept->add_option("--only", f.only, "criterion ids to run");
  accept->add_option("--jobs", acc.jobs, "worker threads");
  accept->add_option("--seed", acc_seed, "base seed");

  long long fuzz_seed = 1;
  int fuzz_jobs = 0;
  auto* fuzz = app.add_subcommand("fuzz", "fuzz the referee with random configurations");
  fuzz->add_option("--configs", f.configs, "configuration count")->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", fuzz_seed, "base seed");
  fuzz->add_option("--jobs", fuzz_jobs, "worker threads");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run || *sweep || *bai || *bar) {
      const bool lists = static_cast<bool>(*sweep);
      Experiment e = resolve(f, lists);
      if (*bai) {
        e.algorithm = "bai";
        if (f.instance.empty() && f.config.empty()) e.instance = "gap";
      }
      if (*bar) {
        e.algorithm = "bar";
        if (f.instance.empty() && f.config.empty()) e.instance = "random";
      }
      return run_experiment(e, lists, out);
    }
    if (*accept) {
      acc.only.insert(f.only.begin(), f.only.end());
      if (acc_seed >= 0) acc.seed = static_cast<Seed>(acc_seed);
      const auto results = run_acceptance(acc, out);
      int failed = 0;
      for (const auto& r : results) failed += r.passed ? 0 : 1;
      out << results.size() - std::size_t(failed) << "/" << results.size() << " criteria passed\n";
      return failed ? kAcceptanceFailure : kOk;
    }
    if (*fuzz) {
      const FuzzReport rep = fuzz_referee(f.configs, static_cast<Seed>(fuzz_seed), fuzz_jobs);
      const ControlReport ctl = run_negative_controls(static_cast<Seed>(fuzz_seed));
      out << rep.configurations << " configurations, " << rep.runs << " runs, " << rep.violations
          << " violations, " << rep.audit_failures << " audit failures, " << rep.errors
          << " errors\n";
      for (const auto& d : rep.details) out << "  " << d << "\n";
      out << "negative controls: hoarder " << (ctl.hoarder ? "caught" : "MISSED") << ", over-pull "
          << (ctl.over_pull ? "caught" : "MISSED") << ", stale handle "
          << (ctl.stale ? "caught" : "MISSED") << "\n";
      const bool ok = rep.violations == 0 && rep.audit_failures == 0 && rep.errors == 0 &&
                      ctl.hoarder && ctl.over_pull && ctl.stale;
      return ok ? kOk : kRefereeViolation;
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const RefereeViolation& e) {
    err << "referee violation: " << e.what() << "\n";
    return kRefereeViolation;
  }
  return kOk;
}

}  // namespace smab::cli
