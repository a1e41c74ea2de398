#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "doctest.h"
#include "smab/algos_large.hpp"
#include "smab/algos_small.hpp"
#include "smab/bar.hpp"
#include "smab/errors.hpp"
#include "smab/harness.hpp"

using namespace smab;

namespace {

InstanceSpec flat(int n, int passes, Seed seed) {
  return make_instance(std::vector<double>(static_cast<std::size_t>(n), 0.5),
                       random_orders(n, passes, seed));
}

InstanceSpec gapped(int n, int passes, Seed seed) {
  return make_instance(single_gap_means(n, n, 0.5, 0.2), random_orders(n, passes, seed));
}

bool contains(const std::vector<SlotId>& v, SlotId s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("large-simple has zero regret on equal means and follows its schedule") {
  const auto config = make_large_config(LargeVariant::SimpleNm1, 10, 9, 2, 200000);
  for (Seed seed = 1; seed <= 5; ++seed) {
    StreamEnv env(flat(10, 2, seed), 2, 200000, 9, seed, RecallMode::DroppedThisPass);
    const RunRecord rec = run_large_simple(env, config);
    CHECK(rec.pseudo_regret == 0.0);
    CHECK_FALSE(rec.violation);
    CHECK_FALSE(rec.truncated);
    REQUIRE(rec.pass_rounds.size() == 2);
    CHECK(rec.pass_rounds[0] == config.schedule.L1);
    CHECK(rec.pass_rounds[1] == config.schedule.Lp1[0] + config.schedule.Lp2[0]);
    CHECK(rec.rounds_used == 200000);
  }
}

TEST_CASE("large-general has zero regret on equal means and follows its schedule") {
  for (const auto& [n, m, passes] : {std::tuple{9, 8, 2}, std::tuple{18, 16, 2}}) {
    const auto config = make_large_config(LargeVariant::General, n, m, passes, 200000);
    StreamEnv env(flat(n, passes, 7), passes, 200000, m, 7);
    const RunRecord rec = run_large_general(env, config);
    CHECK(rec.pseudo_regret == 0.0);
    CHECK_FALSE(rec.violation);
    REQUIRE(rec.pass_rounds.size() == 2);
    CHECK(rec.pass_rounds[0] == config.schedule.L1);
    CHECK(rec.pass_rounds[1] == config.schedule.Lp1[0] + config.schedule.Lp2[0]);
    CHECK(rec.exploitation_rounds == 200000 - rec.pass_rounds[0] - rec.pass_rounds[1]);
    CHECK(rec.king_means.size() == 2);
  }
}

TEST_CASE("large-memory configs reject unsupported shapes") {
  CHECK_THROWS_AS(make_large_config(LargeVariant::SimpleNm1, 10, 8, 1, 100000), ConfigError);
  CHECK_THROWS_AS(make_large_config(LargeVariant::General, 9, 7, 1, 100000), ConfigError);
  CHECK_THROWS_AS(make_large_config(LargeVariant::General, 9, 9, 1, 100000), ConfigError);
  CHECK_THROWS_AS(make_large_config(LargeVariant::General, 9, 1, 1, 100000), ConfigError);
  CHECK_THROWS_AS(make_large_config(LargeVariant::SimpleNm1, 3, 2, 2, 100000), ConfigError);
  CHECK_NOTHROW(make_large_config(LargeVariant::General, 18, 16, 2, 100000));

  auto config = make_large_config(LargeVariant::General, 9, 8, 1, 100000);
  StreamEnv wrong_budget(flat(9, 1, 1), 1, 99999, 8, 1);
  CHECK_THROWS_AS(run_large_general(wrong_budget, config), ConfigError);
  StreamEnv wrong_memory(flat(9, 1, 1), 1, 100000, 7, 1);
  CHECK_THROWS_AS(run_large_general(wrong_memory, config), ConfigError);
  StreamEnv env(flat(9, 1, 1), 1, 100000, 8, 1);
  CHECK_THROWS_AS(run_large_simple(env, config), ConfigError);
}

TEST_CASE("pass-limit warning for many passes") {
  std::vector<std::string> warnings;
  make_large_config(LargeVariant::General, 9, 8, 6, 1 << 20, &warnings);
  CHECK_FALSE(warnings.empty());
  const double limit = std::log(std::log(double(1 << 20))) - std::log(12.0 * std::log(9.0));
  CHECK(large_memory_pass_limit(9, 8, double(1 << 20)) == doctest::Approx(limit));
}

TEST_CASE("a short budget truncates exploration") {
  auto config = make_large_config(LargeVariant::General, 9, 8, 2, 100000);
  config.explore_only = true;
  const Rounds budget = config.schedule.L1 + 5;
  StreamEnv env(flat(9, 2, 3), 2, budget, 8, 3);
  const RunRecord rec = run_large_general(env, config);
  CHECK(rec.truncated);
  CHECK(rec.stage == "pass 2 first findbest");
  CHECK(rec.rounds_used == budget);
  CHECK_FALSE(rec.violation);
}

TEST_CASE("explore-only stops after the last pass") {
  auto config = make_large_config(LargeVariant::General, 9, 8, 2, 100000);
  config.explore_only = true;
  StreamEnv env(gapped(9, 2, 5), 2, kOpenBudget, 8, 5);
  const RunRecord rec = run_large_general(env, config);
  CHECK(rec.exploitation_rounds == 0);
  CHECK(rec.rounds_used == config.schedule.L1 + config.schedule.Lp1[0] + config.schedule.Lp2[0]);
  CHECK(rec.king_means.size() == 2);
}

TEST_CASE("bai levels promote after c_1 arms") {
  const auto sched = schedule_bai(100, 2, 0.1, 0.25);
  REQUIRE(sched.c[0] == 5);
  StreamEnv env(gapped(100, 1, 2), 1, kOpenBudget, 3, 2);
  BaiState st = bai_init(100, 2, 0.1, 0.25);
  CHECK_FALSE(st.top().has_value());
  CHECK_THROWS_AS(bai_finish(st, env), UsageError);

  const Arrival first = *env.read_next();
  bai_feed(st, env, first.slot);
  REQUIRE(st.level_best[0].has_value());
  CHECK(st.level_best[0]->slot == first.slot);
  CHECK(env.stats(first.slot).pulls == sched.s[0]);
  CHECK(st.samples_used == sched.s[0]);
  CHECK(st.top() == first.slot);

  for (Rounds i = 1; i < sched.c[0]; ++i) {
    bai_feed(st, env, env.read_next()->slot);
    CHECK(env.occupied() <= 3);
  }
  CHECK_FALSE(st.level_best[0].has_value());
  REQUIRE(st.level_best[1].has_value());
  CHECK(st.counters[0] == 0);
  CHECK(st.counters[1] == 1);
  CHECK(st.samples_used == sched.c[0] * sched.s[0] + sched.s[1]);
  CHECK(st.top() == st.level_best[1]->slot);

  const SlotId winner = bai_finish(st, env);
  CHECK(env.is_valid(winner));
  CHECK(env.occupied() == 1);
  CHECK(st.samples_used == sched.c[0] * sched.s[0] + 2 * sched.s[1]);
}

TEST_CASE("standalone bai stays within its sample bound") {
  for (Seed seed = 1; seed <= 3; ++seed) {
    StreamEnv env(gapped(50, 1, seed), 1, kOpenBudget, 3, seed);
    const auto res = run_bai_stream(env, 2, 0.1, 0.25);
    CHECK(res.samples == res.record.rounds_used);
    CHECK(res.samples <= res.sample_bound);
    CHECK(res.sample_bound == bai_sample_bound(50, schedule_bai(50, 2, 0.1, 0.25)));
    REQUIRE(res.record.output_mean.has_value());
    CHECK_FALSE(res.record.violation);
  }
  StreamEnv tight(gapped(50, 1, 1), 1, kOpenBudget, 2, 1);
  CHECK_THROWS_AS(run_bai_stream(tight, 2, 0.1, 0.25), ConfigError);
}

TEST_CASE("small-memory pipeline has zero regret on equal means") {
  for (const auto& [m, passes] : {std::pair{5, 2}, std::pair{2, 1}}) {
    const auto config = make_small_config(18, m, passes, 200000);
    StreamEnv env(flat(18, passes, 11), passes, 200000, m, 11);
    const RunRecord rec = run_small(env, config);
    CHECK(rec.pseudo_regret == 0.0);
    CHECK_FALSE(rec.violation);
    CHECK(rec.rounds_used == 200000);
    CHECK(rec.king_means.size() == static_cast<std::size_t>(passes));
  }
}

TEST_CASE("small-memory configs reject unsupported shapes") {
  CHECK_THROWS_AS(make_small_config(9, 8, 1, 100000), ConfigError);
  CHECK_THROWS_AS(make_small_config(18, 1, 1, 100000), ConfigError);
  CHECK_THROWS_AS(make_small_config(18, 2, 1, 361), ConfigError);
  auto config = make_small_config(18, 5, 1, 100000);
  StreamEnv env(flat(18, 1, 1), 1, 100000, 4, 1);
  CHECK_THROWS_AS(run_small(env, config), ConfigError);
}

TEST_CASE("bar keeps m arms including both finalists") {
  const auto config = make_bar_config(18, 16, 0.5, 0.2);
  CHECK(config.L1 == 144);
  CHECK(config.L2 == 200);
  for (Seed seed = 1; seed <= 5; ++seed) {
    Arena arena = open_arena(gapped(18, 1, seed), config.L1 + config.L2, seed);
    const BarResult res = run_bar(arena.env, config, 16);
    CHECK(res.kept.size() == 16);
    CHECK(contains(res.kept, res.first));
    CHECK(contains(res.kept, res.second));
    CHECK(arena.env.rounds_used() == config.L1 + config.L2);
  }
  CHECK(make_bar_config(18, 16, 0.2, 0.5).L1 == 900);
  CHECK_THROWS_AS(make_bar_config(18, 1, 0.5, 0.2), ConfigError);
  CHECK_THROWS_AS(make_bar_config(18, 18, 0.5, 0.2), ConfigError);
  CHECK_THROWS_AS(make_bar_config(18, 16, 1.0, 0.2), ConfigError);
  CHECK_THROWS_AS(make_bar_config(18, 16, 0.5, 0.0), ConfigError);
}
