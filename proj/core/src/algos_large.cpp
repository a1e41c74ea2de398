#include "smab/algos_large.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "smab/errors.hpp"
#include "smab/osmd.hpp"

namespace smab {
namespace {

struct Truncated {
  std::string stage;
};

FindBestResult find_best_or_stop(StreamEnv& env, std::span<const SlotId> slots, Rounds rounds,
                                 std::string stage) {
  FindBestResult fb = find_best(env, slots, rounds);
  if (fb.exhausted) throw Truncated{std::move(stage)};
  return fb;
}

std::string pass_stage(int pass, const char* what) {
  return "pass " + std::to_string(pass) + " " + what;
}

/// Uniform k-subset of `from`, in Fisher-Yates order.
std::vector<SlotId> choose(std::vector<SlotId> from, std::size_t k, Rng& rng) {
  shuffle(std::span<SlotId>(from), rng);
  from.resize(std::min(k, from.size()));
  return from;
}

std::vector<SlotId> without(const std::vector<SlotId>& from, std::initializer_list<SlotId> out) {
  std::vector<SlotId> rest;
  for (SlotId s : from) {
    if (std::find(out.begin(), out.end(), s) == out.end()) rest.push_back(s);
  }
  return rest;
}

Arrival read_or_fail(StreamEnv& env) {
  auto arrival = env.read_next();
  if (!arrival) throw UsageError("stream ended before the algorithm expected");
  return *arrival;
}

void read_rest_of_pass(StreamEnv& env) {
  for (;;) {
    const Arrival a = read_or_fail(env);
    if (a.pass_ended) return;
  }
}

void check_env(const StreamEnv& env, const LargeRunConfig& config) {
  if (env.n() != config.n || env.memory() != config.m || env.passes() != config.passes) {
    throw ConfigError("env does not match the run config (n, m or P differ)");
  }
  if (!config.explore_only && env.budget() != config.horizon) {
    throw ConfigError("env budget differs from the configured horizon T");
  }
}

RunRecord exploit_and_seal(StreamEnv& env, const LargeRunConfig& config) {
  if (config.explore_only) return env.seal();
  const auto arms = env.resident();
  if (env.rounds_left() > 0) {
    const MdState st = run_mirror_descent(env, arms, env.rounds_left());
    if (st.exhausted) env.mark_truncated("exploitation");
  }
  return env.finish();
}

}  // namespace

void validate(const LargeRunConfig& c) {
  if (c.m < 2 || c.m >= c.n) {
    throw ConfigError("large-memory run: need 2 <= m < n (got n=" + std::to_string(c.n) +
                      ", m=" + std::to_string(c.m) + ")");
  }
  if (c.passes < 1) throw ConfigError("large-memory run: need P >= 1");
  if (c.variant == LargeVariant::SimpleNm1) {
    if (c.m != c.n - 1) throw ConfigError("large-simple: requires m = n - 1");
    if (c.passes >= 2 && c.n < 4) throw ConfigError("large-simple: P >= 2 needs n >= 4");
  } else {
    if (9LL * c.m < 8LL * c.n) {
      throw ConfigError("large-general: requires m >= 8n/9 (got n=" + std::to_string(c.n) +
                        ", m=" + std::to_string(c.m) + ")");
    }
    if (c.passes >= 2 && c.m / 2 < c.n - c.m + 1) {
      throw ConfigError("large-general: floor(m/2) must be at least n - m + 1");
    }
  }
  if (c.schedule.L1 < 1 || static_cast<int>(c.schedule.Lp1.size()) != c.passes - 1 ||
      c.schedule.Lp2.size() != c.schedule.Lp1.size()) {
    throw ConfigError("large-memory run: schedule does not match P");
  }
}

LargeRunConfig make_large_config(LargeVariant variant, int n, int m, int passes, Rounds horizon,
                                 std::vector<std::string>* warnings) {
  LargeRunConfig c;
  c.n = n;
  c.m = m;
  c.passes = passes;
  c.horizon = horizon;
  c.variant = variant;
  if (variant == LargeVariant::SimpleNm1) {
    if (m != n - 1) throw ConfigError("large-simple: requires m = n - 1");
    c.schedule = schedule_large_simple(n, passes, horizon);
  } else {
    c.schedule = schedule_large(n, m, passes, horizon);
  }
  validate(c);
  if (warnings != nullptr) {
    const double limit = large_memory_pass_limit(n, m, static_cast<double>(horizon));
    if (passes > limit) {
      warnings->push_back("P=" + std::to_string(passes) +
                          " exceeds log log T - log(12 log(n/(n-m))) = " + std::to_string(limit) +
                          "; extra passes do not improve the bound");
    }
  }
  return c;
}

RunRecord run_large_simple(StreamEnv& env, const LargeRunConfig& config) {
  if (config.variant != LargeVariant::SimpleNm1) throw ConfigError("run_large_simple: wrong variant");
  validate(config);
  check_env(env, config);
  const int n = config.n;
  Rng& rng = env.player_rng();
  try {
    // Pass 1.
    std::vector<SlotId> memory;
    for (int i = 0; i < n - 1; ++i) memory.push_back(read_or_fail(env).slot);
    {
      const auto pair = choose(memory, 2, rng);
      const auto fb = find_best_or_stop(env, pair, config.schedule.L1, pass_stage(1, "findbest"));
      for (SlotId s : pair) {
        if (!(s == fb.slot)) env.drop(s);
      }
      read_rest_of_pass(env);
    }
    for (int p = 2; p <= config.passes; ++p) {
      memory = env.resident();
      const auto first = find_best_or_stop(env, memory, config.schedule.first_findbest(p),
                                           pass_stage(p, "first findbest"));
      auto s_p = choose(without(memory, {first.slot}), 2, rng);
      s_p.push_back(first.slot);
      const auto second = find_best_or_stop(env, s_p, config.schedule.second_findbest(p),
                                            pass_stage(p, "second findbest"));
      const auto droppable = without(s_p, {first.slot, second.slot});
      env.drop(droppable[uniform_below(rng, droppable.size())]);
      read_rest_of_pass(env);
    }
  } catch (const Truncated& t) {
    env.mark_truncated(t.stage);
    return env.seal();
  }
  return exploit_and_seal(env, config);
}

RunRecord run_large_general(StreamEnv& env, const LargeRunConfig& config) {
  if (config.variant != LargeVariant::General) throw ConfigError("run_large_general: wrong variant");
  validate(config);
  check_env(env, config);
  const int n = config.n;
  const int m = config.m;
  const auto gap = static_cast<std::size_t>(n - m);
  Rng& rng = env.player_rng();
  try {
    // Pass 1.
    std::vector<SlotId> memory;
    for (int i = 0; i < m; ++i) memory.push_back(read_or_fail(env).slot);
    {
      const auto s1 = choose(memory, gap + 1, rng);
      const auto fb = find_best_or_stop(env, s1, config.schedule.L1, pass_stage(1, "findbest"));
      for (SlotId s : s1) {
        if (!(s == fb.slot)) env.drop(s);
      }
      read_rest_of_pass(env);
    }
    const auto half = static_cast<std::size_t>(m / 2);
    for (int p = 2; p <= config.passes; ++p) {
      memory = env.resident();
      const auto first = find_best_or_stop(env, memory, config.schedule.first_findbest(p),
                                           pass_stage(p, "first findbest"));
      for (SlotId s : choose(without(memory, {first.slot}), half, rng)) env.drop(s);

      std::vector<SlotId> fresh;
      while (fresh.size() < half) {
        const Arrival a = read_or_fail(env);
        if (a.kind == ArrivalKind::Installed) fresh.push_back(a.slot);
        if (a.pass_ended && fresh.size() < half) {
          throw UsageError("large-general: pass ended before m/2 new arms were read");
        }
      }
      auto s_p = choose(fresh, gap + 1, rng);
      s_p.push_back(first.slot);
      const auto second = find_best_or_stop(env, s_p, config.schedule.second_findbest(p),
                                            pass_stage(p, "second findbest"));
      for (SlotId s : choose(without(s_p, {first.slot, second.slot}), gap, rng)) env.drop(s);
      if (env.passes_ended() < p) read_rest_of_pass(env);
    }
  } catch (const Truncated& t) {
    env.mark_truncated(t.stage);
    return env.seal();
  }
  return exploit_and_seal(env, config);
}

}  // namespace smab
