#pragma once

// Multi-pass regret algorithms for large memory: the m = n-1 warm-up and
// the general m >= 8n/9 algorithm.

#include <string>
#include <vector>

#include "smab/mathkit.hpp"
#include "smab/stream_env.hpp"

namespace smab {

enum class LargeVariant { SimpleNm1, General };

struct LargeRunConfig {
  int n = 0;
  int m = 0;
  int passes = 1;
  Rounds horizon = 0;
  LargeVariant variant = LargeVariant::General;
  ScheduleLarge schedule;
  /// Stop after the last pass instead of exploiting until T.
  bool explore_only = false;
};

/// Builds a validated config with the schedule for the variant.
/// Returns warnings (e.g. P beyond the useful pass limit) in `warnings`.
LargeRunConfig make_large_config(LargeVariant variant, int n, int m, int passes, Rounds horizon,
                                 std::vector<std::string>* warnings = nullptr);

/// Throws ConfigError when the variant's preconditions fail.
void validate(const LargeRunConfig& config);

/// The env must use RecallMode::DroppedThisPass.
RunRecord run_large_simple(StreamEnv& env, const LargeRunConfig& config);
RunRecord run_large_general(StreamEnv& env, const LargeRunConfig& config);

}  // namespace smab
