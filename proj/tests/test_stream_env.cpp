#include <cmath>

#include "doctest.h"
#include "smab/errors.hpp"
#include "smab/stream_env.hpp"

using namespace smab;

namespace {

InstanceSpec three_arms(int passes = 2) {
  return make_instance({0.2, 0.5, 0.8}, identity_orders(3, passes));
}

}  // namespace

TEST_CASE("construction checks") {
  StreamEnv env(three_arms(), 2, 100, 2, 1);
  CHECK(env.occupied() == 0);
  CHECK(env.free_slots() == 2);
  CHECK(env.current_pass() == 1);
  CHECK_THROWS_AS(StreamEnv(three_arms(), 2, 100, 1, 1), ConfigError);
  CHECK_THROWS_AS(StreamEnv(three_arms(), 3, 100, 2, 1), ConfigError);
  CHECK_THROWS_AS(StreamEnv(three_arms(), 0, 100, 2, 1), ConfigError);
  CHECK_THROWS_AS(StreamEnv(three_arms(), 1, 0, 2, 1), ConfigError);
}

TEST_CASE("reads fill the lowest free slot and end passes") {
  StreamEnv env(three_arms(), 2, 100, 2, 1);
  const auto a = env.read_next();
  REQUIRE(a);
  CHECK(a->slot.index == 0);
  CHECK_FALSE(a->already_in_memory());
  CHECK(a->pass == 1);
  const auto b = env.read_next();
  CHECK(b->slot.index == 1);
  CHECK_THROWS_AS(env.read_next(), RefereeViolation);
  CHECK(env.violation());
}

TEST_CASE("memory full, drop, read again") {
  StreamEnv env(three_arms(), 1, 100, 2, 1);
  const auto a = env.read_next();
  env.read_next();
  env.drop(a->slot);
  const auto c = env.read_next();
  REQUIRE(c);
  CHECK(c->slot.index == 0);
  CHECK(c->pass_ended);
  CHECK(env.stream_exhausted());
  CHECK_FALSE(env.read_next());
  CHECK_FALSE(env.violation());
}

TEST_CASE("surviving arms re-arrive as resident with statistics intact") {
  StreamEnv env(three_arms(), 2, 100, 3, 1);
  const SlotId first = env.read_next()->slot;
  env.read_next();
  env.read_next();
  for (int i = 0; i < 5; ++i) env.pull(first);
  CHECK(env.passes_ended() == 1);
  const auto again = env.read_next();
  CHECK(again->already_in_memory());
  CHECK(again->slot == first);
  CHECK(again->pass == 2);
  CHECK(env.stats(first).pulls == 5);
}

TEST_CASE("dropping forgets the arm") {
  StreamEnv env(three_arms(), 2, 100, 3, 1);
  const SlotId first = env.read_next()->slot;
  env.pull(first);
  env.drop(first);
  CHECK_FALSE(env.is_valid(first));
  env.read_next();
  env.read_next();
  const auto back = env.read_next();  // arm 1 in pass 2
  CHECK_FALSE(back->already_in_memory());
  CHECK(env.stats(back->slot).pulls == 0);
  CHECK_FALSE(back->slot == first);  // new generation
}

TEST_CASE("handle misuse is a violation") {
  SUBCASE("empty slot") {
    StreamEnv env(three_arms(), 1, 100, 2, 1);
    CHECK_THROWS_AS(env.pull(SlotId{0, 0}), RefereeViolation);
    CHECK(env.violation());
  }
  SUBCASE("out of range") {
    StreamEnv env(three_arms(), 1, 100, 2, 1);
    try {
      env.pull(SlotId{5, 0});
      FAIL("expected a violation");
    } catch (const RefereeViolation& v) {
      CHECK(v.kind() == ViolationKind::EmptySlot);
    }
  }
  SUBCASE("stale handle") {
    StreamEnv env(three_arms(), 1, 100, 2, 1);
    const SlotId a = env.read_next()->slot;
    env.drop(a);
    env.read_next();
    try {
      env.pull(a);
      FAIL("expected a violation");
    } catch (const RefereeViolation& v) {
      CHECK(v.kind() == ViolationKind::StaleHandle);
    }
  }
  SUBCASE("drop empty") {
    StreamEnv env(three_arms(), 1, 100, 2, 1);
    CHECK_THROWS_AS(env.drop(SlotId{1, 0}), RefereeViolation);
  }
}

TEST_CASE("budget: GameOver once, then a violation") {
  StreamEnv env(three_arms(), 1, 3, 2, 1);
  const SlotId a = env.read_next()->slot;
  for (int i = 0; i < 3; ++i) env.pull(a);
  CHECK_THROWS_AS(env.pull(a), GameOver);
  CHECK_FALSE(env.violation());
  try {
    env.pull(a);
    FAIL("expected a violation");
  } catch (const RefereeViolation& v) {
    CHECK(v.kind() == ViolationKind::BudgetExceeded);
  }
  CHECK(env.violation());
}

TEST_CASE("pull_repeated takes what the budget allows") {
  StreamEnv env(make_instance({1.0, 0.0}, identity_orders(2, 1)), 1, 10, 2, 1);
  const SlotId a = env.read_next()->slot;
  CHECK(env.pull_repeated(a, 4) == 4);
  CHECK_THROWS_AS(env.pull_repeated(a, 10), GameOver);
  CHECK(env.rounds_used() == 10);
  CHECK(env.stats(a).pulls == 10);
  CHECK_THROWS_AS(env.pull_repeated(a, -1), UsageError);
}

TEST_CASE("degenerate and fair Bernoulli rewards") {
  StreamEnv env(make_instance({1.0, 0.5}, identity_orders(2, 1)), 1, 1000001, 2, 42);
  const SlotId one = env.read_next()->slot;
  const SlotId half = env.read_next()->slot;
  CHECK(env.pull(one) == 1);
  for (int i = 0; i < 1000000; ++i) env.pull(half);
  // 3 sigma of a fair coin mean over 10^6 draws.
  CHECK(std::fabs(env.stats(half).empirical_mean() - 0.5) <= 3.0 * std::sqrt(0.25 / 1e6));
}

TEST_CASE("finish requires the whole budget and accounts rounds per pass") {
  StreamEnv env(three_arms(), 2, 20, 3, 1);
  const SlotId a = env.read_next()->slot;
  env.pull(a);
  env.pull(a);
  env.read_next();
  env.pull(a);
  env.read_next();  // pass 1 ends
  for (int i = 0; i < 4; ++i) env.pull(a);
  CHECK_THROWS_AS(env.finish(), UsageError);
  env.read_next();
  env.read_next();
  env.read_next();  // pass 2 ends
  while (env.rounds_left() > 0) env.pull(a);
  const RunRecord rec = env.finish();
  CHECK(rec.pass_rounds == std::vector<Rounds>{3, 4});
  CHECK(rec.exploitation_rounds == 13);
  CHECK(rec.rounds_used == 20);
  CHECK(rec.pseudo_regret == doctest::Approx(20 * 0.6));
  CHECK(rec.king_means.size() == 2);
  CHECK(rec.king_means[0] == 0.8);  // best resident at the end of pass 1
  CHECK_FALSE(rec.violation);
}

TEST_CASE("all-equal means give exactly zero regret") {
  StreamEnv env(make_instance({0.3, 0.3, 0.3}, identity_orders(3, 1)), 1, 500, 3, 5);
  std::vector<SlotId> s;
  while (auto a = env.read_next()) s.push_back(a->slot);
  for (int i = 0; i < 500; ++i) env.pull(s[std::size_t(i % 3)]);
  CHECK(env.finish().pseudo_regret == 0.0);
}

TEST_CASE("runs are reproducible") {
  auto once = [] {
    StreamEnv env(three_arms(1), 1, 200, 3, 77);
    std::vector<SlotId> s;
    while (auto a = env.read_next()) s.push_back(a->slot);
    double sum = 0;
    for (int i = 0; i < 200; ++i) sum += env.pull(s[std::size_t(i % 3)]);
    return sum;
  };
  CHECK(once() == once());
}

TEST_CASE("recall mode recognizes arms dropped since the last pass ended") {
  const auto inst = make_instance({0.2, 0.5, 0.8}, identity_orders(3, 2));
  StreamEnv env(inst, 2, 100, 2, 1, RecallMode::DroppedThisPass);
  const SlotId a1 = env.read_next()->slot;
  env.read_next();
  env.drop(a1);                            // forgotten at the end of pass 1
  const SlotId a3 = env.read_next()->slot;  // pass 1 ends
  env.drop(a3);                            // counts toward pass 2
  CHECK(env.read_next()->kind == ArrivalKind::Installed);  // arm 1
  CHECK(env.read_next()->kind == ArrivalKind::Resident);   // arm 2
  const auto recalled = env.read_next();                   // arm 3, memory is full
  CHECK(recalled->kind == ArrivalKind::RecalledDrop);
  CHECK(recalled->pass_ended);
  CHECK_FALSE(env.violation());

  StreamEnv strict(inst, 2, 100, 2, 1);
  const SlotId b1 = strict.read_next()->slot;
  strict.read_next();
  strict.drop(b1);
  strict.drop(strict.read_next()->slot);
  strict.read_next();
  strict.read_next();
  CHECK_THROWS_AS(strict.read_next(), RefereeViolation);
}

TEST_CASE("arena holds every arm") {
  Arena arena = open_arena(three_arms(1), 10, 1);
  CHECK(arena.slots.size() == 3);
  CHECK(arena.env.stream_exhausted());
  CHECK(arena.env.memory() == 3);
}
