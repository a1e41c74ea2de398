#include "smab/algos_small.hpp"

#include <array>
#include <string>

#include "smab/errors.hpp"
#include "smab/osmd.hpp"

namespace smab {

std::optional<SlotId> BaiState::top() const {
  for (int l = r; l >= 1; --l) {
    const auto& best = level_best[static_cast<std::size_t>(l - 1)];
    if (best) return best->slot;
  }
  return std::nullopt;
}

BaiState bai_init(int stream_size, int r, double eps, double delta) {
  BaiState st;
  st.schedule = schedule_bai(stream_size, r, eps, delta);
  st.r = r;
  st.level_best.assign(static_cast<std::size_t>(r), std::nullopt);
  st.level_mean.assign(static_cast<std::size_t>(r), 0.0);
  st.counters.assign(static_cast<std::size_t>(r), 0);
  st.eps = eps;
  st.delta = delta;
  return st;
}

void bai_feed(BaiState& st, StreamEnv& env, SlotId slot) {
  ++st.fed;
  SlotId challenger = slot;
  for (int l = 1; l <= st.r; ++l) {
    const auto i = static_cast<std::size_t>(l - 1);
    const Rounds s = st.schedule.s[i];
    st.samples_used += s;
    const double mean = static_cast<double>(env.pull_repeated(challenger, s)) / double(s);
    if (mean < st.level_mean[i]) {
      env.drop(challenger);
    } else {
      if (st.level_best[i]) env.drop(st.level_best[i]->slot);
      st.level_best[i] = LevelBest{challenger, mean};
      st.level_mean[i] = mean;
    }
    ++st.counters[i];
    // The top level absorbs everything; its threshold covers the whole stream.
    if (st.counters[i] < st.schedule.c[i] || l == st.r) break;
    challenger = st.level_best[i]->slot;
    st.level_best[i].reset();
    st.level_mean[i] = 0.0;
    st.counters[i] = 0;
  }
}

SlotId bai_finish(BaiState& st, StreamEnv& env) {
  if (st.fed == 0) throw UsageError("bai_finish: no arm was fed");
  const Rounds s = st.schedule.s.back();
  std::optional<LevelBest> winner;
  for (auto& best : st.level_best) {
    if (!best) continue;
    st.samples_used += s;
    best->mean = static_cast<double>(env.pull_repeated(best->slot, s)) / double(s);
    if (!winner || best->mean > winner->mean) winner = best;
  }
  for (auto& best : st.level_best) {
    if (best && !(best->slot == winner->slot)) env.drop(best->slot);
    best.reset();
  }
  return winner->slot;
}

void validate(const SmallRunConfig& c) {
  if (c.m < 2 || 9LL * c.m >= 8LL * c.n) {
    throw ConfigError("small-memory run: need 2 <= m < 8n/9 (got n=" + std::to_string(c.n) +
                      ", m=" + std::to_string(c.m) + ")");
  }
  if (c.passes < 1) throw ConfigError("small-memory run: need P >= 1");
  if (static_cast<int>(c.schedule.s.size()) != c.passes ||
      static_cast<int>(c.schedule.eps.size()) != c.passes + 1) {
    throw ConfigError("small-memory run: schedule does not match P");
  }
  for (int p = 1; p <= c.passes; ++p) {
    const double eps = c.schedule.eps[static_cast<std::size_t>(p)];
    if (!(eps < 1.0)) {
      throw ConfigError("small-memory run: eps_" + std::to_string(p) + " = " + std::to_string(eps) +
                        " is not below 1; T is too small for P=" + std::to_string(c.passes));
    }
  }
}

SmallRunConfig make_small_config(int n, int m, int passes, Rounds horizon, double delta,
                                 std::vector<std::string>* warnings) {
  SmallRunConfig c;
  c.n = n;
  c.m = m;
  c.passes = passes;
  c.horizon = horizon;
  c.delta = delta;
  c.schedule = schedule_small(n, m, passes, horizon, delta);
  validate(c);
  if (warnings != nullptr) {
    const double limit = large_memory_pass_limit(n, m, static_cast<double>(horizon));
    if (passes > limit) {
      warnings->push_back("P=" + std::to_string(passes) +
                          " exceeds log log T - log(12 log(n/(n-m))) = " + std::to_string(limit));
    }
  }
  return c;
}

RunRecord run_small(StreamEnv& env, const SmallRunConfig& config) {
  validate(config);
  if (env.n() != config.n || env.memory() != config.m || env.passes() != config.passes) {
    throw ConfigError("env does not match the run config (n, m or P differ)");
  }
  if (!config.explore_only && env.budget() != config.horizon) {
    throw ConfigError("env budget differs from the configured horizon T");
  }
  const int r = config.schedule.r;
  std::string stage;
  SlotId king;
  try {
    for (int p = 1; p <= config.passes; ++p) {
      const std::string tag = "pass " + std::to_string(p);
      const double eps = config.schedule.eps[static_cast<std::size_t>(p)];
      const Rounds duel = config.schedule.duel_rounds(p);
      BaiState bai = bai_init(config.n + 1, r, eps, config.delta);
      bool ended = false;
      stage = tag + " bai";
      if (p == 1) {
        const auto first = env.read_next();
        king = first->slot;
        ended = first->pass_ended;
      }
      bai_feed(bai, env, king);
      while (!ended) {
        const auto arrival = env.read_next();
        ended = arrival->pass_ended;
        if (arrival->kind == ArrivalKind::Resident) continue;
        const std::array<SlotId, 2> pair{*bai.top(), arrival->slot};
        stage = tag + " admission";
        const FindBestResult fb = find_best(env, pair, duel);
        if (fb.exhausted) throw GameOver();
        stage = tag + " bai";
        if (fb.slot == arrival->slot) {
          env.probe("admitted", arrival->slot);
          bai_feed(bai, env, arrival->slot);
        } else {
          env.drop(arrival->slot);
        }
      }
      stage = tag + " bai finish";
      king = bai_finish(bai, env);
      env.declare_king(p, king);
    }
    if (config.explore_only) return env.seal();
    stage = "exploitation";
    if (env.rounds_left() > 0) env.pull_repeated(king, env.rounds_left());
  } catch (const GameOver&) {
    env.mark_truncated(stage);
    return env.seal();
  }
  return env.finish();
}

BaiRunResult run_bai_stream(StreamEnv& env, int r, double eps, double delta) {
  if (env.memory() < r + 1) {
    throw ConfigError("bai: r=" + std::to_string(r) + " levels need m >= r + 1 = " +
                      std::to_string(r + 1) + " slots");
  }
  BaiState bai = bai_init(env.n(), r, eps, delta);
  BaiRunResult out;
  out.sample_bound = bai_sample_bound(env.n(), bai.schedule);
  try {
    for (;;) {
      const auto arrival = env.read_next();
      if (arrival->kind != ArrivalKind::Resident) bai_feed(bai, env, arrival->slot);
      if (arrival->pass_ended) break;
    }
    const SlotId king = bai_finish(bai, env);
    const std::array<SlotId, 1> output{king};
    env.declare_output(output);
    env.declare_king(1, king);
  } catch (const GameOver&) {
    env.mark_truncated("bai");
  }
  out.samples = bai.samples_used;
  out.record = env.seal();
  return out;
}

}  // namespace smab
