#pragma once

// Small-memory pipeline: a multi-level streaming (eps, delta)-PAC best-arm
// identification routine, wrapped per pass with an admission duel.

#include <optional>
#include <vector>

#include "smab/mathkit.hpp"
#include "smab/stream_env.hpp"

namespace smab {

struct LevelBest {
  SlotId slot;
  double mean = 0.0;  // empirical mean from the arm's most recent level samples
};

struct BaiState {
  int r = 0;
  std::vector<std::optional<LevelBest>> level_best;  // a*_l, index l - 1
  std::vector<double> level_mean;                    // muhat*_l, reset to 0
  std::vector<Rounds> counters;                      // C_l
  ScheduleBai schedule;
  double eps = 0.0;
  double delta = 0.25;
  Rounds samples_used = 0;
  Rounds fed = 0;

  /// Highest non-empty level best, if any.
  std::optional<SlotId> top() const;
};

/// Fresh state for a stream of at most `stream_size` arms with `r` levels.
BaiState bai_init(int stream_size, int r, double eps, double delta);

/// Runs the challenger in `slot` up the levels. Pulls go through the env;
/// a GameOver from the env propagates.
void bai_feed(BaiState& state, StreamEnv& env, SlotId slot);

/// Refreshes every level best with s_r samples, keeps the best and drops the
/// others. UsageError if nothing was ever fed.
SlotId bai_finish(BaiState& state, StreamEnv& env);

struct SmallRunConfig {
  int n = 0;
  int m = 0;
  int passes = 1;
  Rounds horizon = 0;
  double delta = 0.25;
  ScheduleSmall schedule;
  bool explore_only = false;
};

/// Validated config; ConfigError when eps_p >= 1 for some pass (T too small for P).
SmallRunConfig make_small_config(int n, int m, int passes, Rounds horizon, double delta = 0.25,
                                 std::vector<std::string>* warnings = nullptr);
void validate(const SmallRunConfig& config);

RunRecord run_small(StreamEnv& env, const SmallRunConfig& config);

/// Standalone BAI over one full pass of the stream, no admission filter.
/// Declares the returned arm as output; samples used = rounds_used.
struct BaiRunResult {
  RunRecord record;
  Rounds samples = 0;
  Rounds sample_bound = 0;
};
BaiRunResult run_bai_stream(StreamEnv& env, int r, double eps, double delta);

}  // namespace smab
