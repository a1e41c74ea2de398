#pragma once

// Monte-Carlo experiment engine: seeded repetitions over a parameter grid,
// deterministic aggregation, exponent fitting and result emission.

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "smab/instances.hpp"
#include "smab/mathkit.hpp"
#include "smab/rng.hpp"
#include "smab/stream_env.hpp"

namespace smab {

inline constexpr int kSchemaVersion = 1;
/// Env budget used by explore-only analysis runs: effectively unbounded.
inline constexpr Rounds kOpenBudget = Rounds{1} << 60;

enum class AlgorithmId { LargeSimple, LargeGeneral, Small, Uniform, Bai, Bar };

std::string to_string(AlgorithmId id);
AlgorithmId parse_algorithm(const std::string& name);

/// "large-general" iff 9m >= 8n, otherwise "small". ConfigError unless 2 <= m < n.
AlgorithmId select_algorithm(int n, int m);

struct Experiment {
  std::string algorithm = "auto";
  std::string instance = "hard-worst";  // hard-worst, hard, h0, gap, gap-last, random
  std::vector<int> n{9};
  std::vector<int> m{8};
  std::vector<int> passes{1};
  std::vector<Rounds> horizon{1 << 16};
  int reps = 100;
  Seed seed = 1;
  int jobs = 0;  // 0: SMAB_JOBS or hardware concurrency
  double gap = 0.2;
  int hard_j = 1;
  int hard_level = -1;  // -1: use P
  double c1 = 1.0;
  double delta = 0.25;
  double eps = 0.1;   // bai
  int levels = 0;     // bai level count, 0: min(log*(n), m - 1)
  double eps0 = 0.5;  // bar
  double eps1 = 0.2;  // bar
  bool explore_only = false;
  std::string out;

  friend bool operator==(const Experiment&, const Experiment&) = default;
};

struct GridPoint {
  AlgorithmId algorithm = AlgorithmId::LargeGeneral;
  int n = 0;
  int m = 0;
  int passes = 1;
  Rounds horizon = 0;

  std::string key() const;
};

/// Cartesian product of the grid lists; resolves "auto" per point.
std::vector<GridPoint> expand_grid(const Experiment& exp);

/// Condensed outcome of one seeded run.
struct RunOutcome {
  int point = 0;
  int variant = 0;  // arm index j for hard-family sweeps, 0 otherwise
  int rep = 0;
  Seed seed = 0;
  double pseudo_regret = 0.0;
  std::vector<Rounds> pass_rounds;
  bool violation = false;
  std::string violation_kind;
  bool truncated = false;
  std::vector<double> king_gaps;  // per pass
  std::optional<double> output_gap;
  Rounds rounds_used = 0;
  Rounds samples = 0;
  Rounds sample_bound = 0;
  std::string error;  // non-empty when the run raised
};

struct Stat {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};
/// Mean and standard error (sample stddev / sqrt(count)), summed in order.
Stat summarize(const std::vector<double>& values);

struct PointSummary {
  GridPoint point;
  int reps = 0;
  Stat regret;                    // worst variant for hard-worst
  int worst_variant = 0;
  std::vector<double> mean_pass_rounds;
  int violations = 0;
  int truncated = 0;
  std::vector<Stat> king_gap;     // per pass
  std::optional<Stat> output_gap;
  Rounds max_samples = 0;
  Rounds sample_bound = 0;
};

struct ExponentFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  std::size_t used = 0;
  std::vector<std::string> warnings;
};

/// OLS slope of log(regret) on log(T). Nonpositive regrets are dropped with
/// a warning; fewer than 3 usable points or repeated T is a ConfigError.
ExponentFit estimate_exponent(const std::vector<std::pair<double, double>>& points);

struct FitSummary {
  int n = 0, m = 0, passes = 0;
  AlgorithmId algorithm = AlgorithmId::LargeGeneral;
  ExponentFit fit;
  double target = 0.0;
};

struct Summary {
  Experiment experiment;
  std::vector<PointSummary> points;
  std::vector<FitSummary> fits;
  std::vector<RunOutcome> runs;
  std::vector<std::string> warnings;
};

/// Pure function of the experiment: identical output for any job count.
Summary simulate(const Experiment& exp);

/// One seeded run of a grid point (variant = j for hard families).
RunOutcome run_once(const Experiment& exp, const GridPoint& point, int variant, int rep,
                    Seed seed);

/// Per-repetition seed derived from base seed, point key, variant and rep.
Seed run_seed(Seed base, const GridPoint& point, int variant, int rep);

/// Worker count: explicit value, else SMAB_JOBS, else hardware concurrency.
int resolve_jobs(int requested);

/// Calls fn(i) for i in [0, count) on `jobs` threads. The first exception is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

std::string summary_csv(const Summary& summary);
std::string summary_json(const Summary& summary);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};
/// Standalone log-log line chart.
std::string svg_loglog(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);

struct FuzzReport {
  int configurations = 0;
  int runs = 0;
  int violations = 0;
  int audit_failures = 0;
  int errors = 0;
  std::vector<std::string> details;  // first few offending configurations
};

/// Randomized configurations of every shipped algorithm against the strict referee.
FuzzReport fuzz_referee(int configurations, Seed seed, int jobs = 0);

/// Deliberately broken policies; each flag is true when the referee caught it.
struct ControlReport {
  bool hoarder = false;    // reads m + 1 arms without dropping
  bool over_pull = false;  // keeps pulling after the budget is signalled
  bool stale = false;      // pulls through the handle of a dropped arm
};
ControlReport run_negative_controls(Seed seed);

}  // namespace smab
