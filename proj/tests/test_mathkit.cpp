#include <cmath>

#include "doctest.h"
#include "smab/errors.hpp"
#include "smab/mathkit.hpp"

using namespace smab;

// Expected values below come from an independent Python evaluation of the
// schedule formulas (float64, ceiling applied last).

TEST_CASE("ilog follows the clamped recursion") {
  CHECK(ilog(0, 16.0) == 16.0);
  CHECK(ilog(1, std::exp(1.0)) == 1.0);
  CHECK(ilog(2, 100.0) == doctest::Approx(1.5271796258079011).epsilon(1e-15));
  CHECK(ilog(5, 1e9) == 1.0);
  CHECK_THROWS_AS(ilog(-1, 10.0), DomainError);
  CHECK_THROWS_AS(ilog(1, 0.5), DomainError);
}

TEST_CASE("ilog is monotone in both arguments") {
  for (double a : {1.0, 2.0, 15.0, 1e3, 1e12}) {
    for (int k = 0; k < 5; ++k) {
      CHECK(ilog(k + 1, a) <= ilog(k, a));
      CHECK(ilog(k, a) <= ilog(k, a * 1.5));
    }
  }
}

TEST_CASE("log_star counts logs until the clamp") {
  CHECK(log_star(1.0) == 0);
  CHECK(log_star(std::exp(1.0)) == 1);
  CHECK(log_star(15.0) == 2);
  CHECK(log_star(10.0) == 2);
  CHECK(log_star(19.0) == 3);
  CHECK_THROWS_AS(log_star(0.5), DomainError);
  for (double x : {3.0, 50.0, 1e6}) CHECK(ilog(log_star(x), x) == 1.0);
}

TEST_CASE("lambda_p values and identities") {
  CHECK(lambda_p(1, 1) == doctest::Approx(1.0 / 3));
  CHECK(lambda_p(3, 1) == doctest::Approx(7.0 / 15));
  CHECK(lambda_p(3, 3) == doctest::Approx(1.0 / 15));
  CHECK_THROWS_AS(lambda_p(2, 3), DomainError);
  CHECK_THROWS_AS(lambda_p(2, 0), DomainError);
  for (int P = 1; P <= 10; ++P) {
    const double denom = std::ldexp(1.0, P + 1) - 1.0;
    CHECK(denom * (1.0 - lambda_p(P, 1)) == doctest::Approx(std::ldexp(1.0, P)).epsilon(1e-12));
    for (int p = 1; p < P; ++p) CHECK(lambda_p(P, p + 1) < lambda_p(P, p));
  }
  CHECK(regret_exponent(1) == doctest::Approx(2.0 / 3));
  CHECK(regret_exponent(2) == doctest::Approx(4.0 / 7));
  CHECK(regret_exponent(3) == doctest::Approx(8.0 / 15));
}

TEST_CASE("schedule_large matches direct evaluation") {
  const auto a = schedule_large(10, 9, 2, 1000000);
  CHECK(a.L1 == 24);
  CHECK(a.first_findbest(2) == 17496);
  CHECK(a.second_findbest(2) == 17993);
  CHECK(schedule_large(10, 9, 1, 1000000).L1 == 539);
  CHECK(schedule_large(10, 9, 1, 1000000).Lp1.empty());

  const auto b = schedule_large(18, 16, 2, 1000000);
  CHECK(b.L1 == 35);
  CHECK(b.first_findbest(2) == 17920);
  CHECK(b.second_findbest(2) == 20473);

  const auto c = schedule_large(9, 8, 3, Rounds{1} << 20);
  CHECK(c.L1 == 4);
  CHECK(c.Lp1 == std::vector<Rounds>{2048, 870912});
  CHECK(c.Lp2 == std::vector<Rounds>{1701, 77613});
}

TEST_CASE("schedule_large grows with T and across passes") {
  Rounds prev_l1 = 0;
  for (Rounds t = 121; t < (Rounds{1} << 30); t *= 3) {
    const auto s = schedule_large(10, 9, 3, t);
    CHECK(s.L1 >= prev_l1);
    prev_l1 = s.L1;
    CHECK(s.second_findbest(3) >= s.second_findbest(2));
  }
}

TEST_CASE("schedule_large rejects bad parameters") {
  CHECK_THROWS_AS(schedule_large(10, 10, 1, 1000000), ConfigError);
  CHECK_THROWS_AS(schedule_large(10, 1, 1, 1000000), ConfigError);
  CHECK_THROWS_AS(schedule_large(10, 9, 0, 1000000), ConfigError);
  CHECK_THROWS_AS(schedule_large(10, 9, 1, 120), ConfigError);
  CHECK_NOTHROW(schedule_large(10, 9, 1, 121));
}

TEST_CASE("schedule_large_simple chains the first FindBest off n^3") {
  const auto base = schedule_large(10, 9, 3, 1000000);
  const auto s = schedule_large_simple(10, 3, 1000000);
  CHECK(s.L1 == base.L1);
  CHECK(s.Lp2 == base.Lp2);
  CHECK(s.first_findbest(2) == 1000 * s.L1);
  CHECK(s.first_findbest(3) == 1000 * s.second_findbest(2));
}

TEST_CASE("schedule_small matches direct evaluation") {
  const auto a = schedule_small(9, 3, 1, 1000000);
  REQUIRE(a.eps.size() == 2);
  CHECK(a.eps[0] == 1.0);
  CHECK(a.eps[1] == doctest::Approx(0.04308869380063766).epsilon(1e-12));
  CHECK(a.duel_rounds(1) == 74109);
  CHECK(a.r == 2);

  const auto b = schedule_small(18, 5, 2, 1000000);
  CHECK(b.r == 3);
  CHECK(b.eps[1] == doctest::Approx(0.17911520264428343).epsilon(1e-12));
  CHECK(b.eps[2] == doctest::Approx(0.018951285827386862).epsilon(1e-12));
  CHECK(b.s == std::vector<Rounds>{3534, 315644});

  const auto c = schedule_small(18, 2, 2, 361 * 64);
  CHECK(c.r == 1);
  CHECK(c.s == std::vector<Rounds>{401, 8958});
  CHECK_THROWS_AS(schedule_small(9, 8, 1, 1000000), ConfigError);
  CHECK_THROWS_AS(schedule_small(9, 1, 1, 1000000), ConfigError);
}

TEST_CASE("schedule_bai and its worst-case sample bound") {
  const auto s = schedule_bai(100, 2, 0.1, 0.25);
  CHECK(s.c == std::vector<Rounds>{5, 100});
  CHECK(s.s == std::vector<Rounds>{16241, 112180});
  CHECK(bai_sample_bound(100, s) == 4092060);

  const auto t = schedule_bai(50, 2, 0.05, 0.25);
  CHECK(t.c == std::vector<Rounds>{4, 50});
  CHECK(bai_sample_bound(50, t) == 8890534);
  for (int r = 1; r <= log_star(1e5); ++r) CHECK(schedule_bai(100000, r, 0.2, 0.25).c.back() == 100000);
  CHECK_THROWS_AS(schedule_bai(100, 4, 0.1, 0.25), ConfigError);
  CHECK_THROWS_AS(schedule_bai(100, 2, 1.0, 0.25), ConfigError);
  CHECK_THROWS_AS(schedule_bai(100, 2, 0.1, 0.3), ConfigError);
}

TEST_CASE("guarded_ceil resolves near-integer values with the precise side") {
  CHECK(guarded_ceil(3.2, 3.2L) == 4);
  CHECK(guarded_ceil(5.0000000000001, 5.0L) == 5);
  CHECK(guarded_ceil(4.9999999999999, 5.0000000001L) == 6);
}
