#include <array>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "smab/errors.hpp"
#include "smab/osmd.hpp"

using namespace smab;

namespace {

// Brute-force minimizer of <q, l> + B_F(q, Q) / eta over the 3-simplex with
// F(q) = -2 sum sqrt(q): dense grid, then compass search.
std::array<double, 3> brute_force_step(const std::array<double, 3>& Q, const std::array<double, 3>& l,
                                       double eta) {
  auto objective = [&](double a, double b) {
    const double c = 1.0 - a - b;
    if (a <= 0 || b <= 0 || c <= 0) return HUGE_VAL;
    const double q[3] = {a, b, c};
    double v = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double bregman = -2.0 * std::sqrt(q[i]) + 2.0 * std::sqrt(Q[i]) +
                             (q[i] - Q[i]) / std::sqrt(Q[i]);
      v += q[i] * l[i] + bregman / eta;
    }
    return v;
  };
  double best_a = 1.0 / 3, best_b = 1.0 / 3, best = HUGE_VAL;
  const int grid = 400;
  for (int i = 1; i < grid; ++i) {
    for (int j = 1; i + j < grid; ++j) {
      const double a = double(i) / grid, b = double(j) / grid;
      const double v = objective(a, b);
      if (v < best) best = v, best_a = a, best_b = b;
    }
  }
  for (double h = 1.0 / grid; h > 1e-12; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      const double da[] = {h, -h, 0, 0, h, -h}, db[] = {0, 0, h, -h, -h, h};
      for (int d = 0; d < 6; ++d) {
        const double v = objective(best_a + da[d], best_b + db[d]);
        if (v < best) best = v, best_a += da[d], best_b += db[d], moved = true;
      }
    }
  }
  return {best_a, best_b, 1.0 - best_a - best_b};
}

}  // namespace

TEST_CASE("md_init") {
  const auto a = md_init(4, 100);
  CHECK(a.q == std::vector<double>(4, 0.25));
  CHECK(md_init(1, 10).q == std::vector<double>{1.0});
  CHECK(md_init(2, 50).eta == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(md_init(0, 10), DomainError);
  CHECK_THROWS_AS(md_init(2, 0), DomainError);
}

TEST_CASE("loss estimator transcription") {
  MdState st = md_init(4, 100);
  st.eta = 0.1;
  const auto e = loss_estimator(st, 0, 1.0);
  // 0.5 + 0.0125 (1 + 1/0.75) - 0.1 * 0.25 / (8 * 0.75)
  CHECK(e[0] == doctest::Approx(0.525).epsilon(1e-9));
  CHECK(e[1] == doctest::Approx(-0.025 / 6).epsilon(1e-9));
  CHECK(e[2] == e[1]);

  MdState single = md_init(1, 100);
  CHECK(loss_estimator(single, 0, 0.5)[0] == doctest::Approx(single.eta / 8));

  // Independent evaluation for a skewed q.
  MdState sk = md_init(3, 64);
  sk.q = {0.6, 0.3, 0.1};
  const auto f = loss_estimator(sk, 1, 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = sk.q[i] + std::sqrt(sk.q[i]);
    double want = -sk.eta * sk.q[1] / (8 * d);
    if (i == 1) want += 0.0 - 0.5 + sk.eta / 8 * (1 + 1 / d);
    CHECK(f[i] == doctest::Approx(want).epsilon(1e-12));
  }
  sk.q = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(loss_estimator(sk, 1, 0.0), NumericError);
}

TEST_CASE("md_step fixed point and direction") {
  MdState st = md_init(5, 100);
  st.q = {0.1, 0.2, 0.3, 0.15, 0.25};
  const auto before = st.q;
  md_step(st, std::vector<double>(5, 0.0));
  for (std::size_t i = 0; i < 5; ++i) CHECK(st.q[i] == doctest::Approx(before[i]).epsilon(1e-9));

  MdState two = md_init(2, 50);
  md_step(two, std::vector<double>{1.0, 0.0});
  CHECK(two.q[0] < 0.5);
  CHECK(two.q[1] > 0.5);
  CHECK_THROWS_AS(md_step(two, std::vector<double>{1.0}), DomainError);
}

TEST_CASE("md_step agrees with a brute-force simplex minimizer") {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    std::array<double, 3> Q{}, l{};
    double total = 0;
    for (double& v : Q) total += (v = 0.05 + uniform01(rng));
    for (double& v : Q) v /= total;
    for (double& v : l) v = 4.0 * uniform01(rng) - 2.0;
    const double eta = 0.05 + 0.5 * uniform01(rng);
    MdState st = md_init(3, 10);
    st.eta = eta;
    st.q.assign(Q.begin(), Q.end());
    md_step(st, std::vector<double>(l.begin(), l.end()));
    const auto want = brute_force_step(Q, l, eta);
    for (std::size_t i = 0; i < 3; ++i) CHECK(st.q[i] == doctest::Approx(want[i]).epsilon(1e-4));
  }
}

TEST_CASE("md_observe equals estimator followed by md_step") {
  Rng rng(5);
  MdState a = md_init(6, 500), b = md_init(6, 500);
  for (int t = 0; t < 2000; ++t) {
    const auto arm = static_cast<std::size_t>(uniform_below(rng, 6));
    const double loss = uniform01(rng) < 0.5 ? 1.0 : 0.0;
    md_observe(a, arm, loss);
    md_step(b, loss_estimator(b, arm, loss));
    double sum = 0;
    for (double v : a.q) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (std::size_t i = 0; i < 6; ++i) CHECK(a.q[i] == doctest::Approx(b.q[i]).epsilon(1e-9));
}

TEST_CASE("md_step stays interior under extreme estimates") {
  MdState st = md_init(4, 4);
  for (int t = 0; t < 200; ++t) md_step(st, std::vector<double>{-50.0, 50.0, 50.0, 50.0});
  double sum = 0;
  for (double v : st.q) {
    CHECK(v >= 1e-12);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("run_mirror_descent conserves plays and is zero-regret on equal means") {
  Arena arena = open_arena(make_instance({0.4, 0.4, 0.4}, identity_orders(3, 1)), 1000, 3);
  const MdState st = run_mirror_descent(arena.env, arena.slots, 1000);
  CHECK(std::accumulate(st.plays.begin(), st.plays.end(), Rounds{0}) == 1000);
  CHECK(st.rounds_done == 1000);
  CHECK_FALSE(st.exhausted);
  CHECK(arena.env.finish().pseudo_regret == 0.0);
}

TEST_CASE("run_mirror_descent stops at the env budget") {
  Arena arena = open_arena(make_instance({0.4, 0.6}, identity_orders(2, 1)), 50, 3);
  const MdState st = run_mirror_descent(arena.env, arena.slots, 80);
  CHECK(st.exhausted);
  CHECK(st.rounds_done == 50);
  Arena one = open_arena(make_instance({0.4, 0.6}, identity_orders(2, 1)), 50, 3);
  const MdState single = run_mirror_descent(one.env, std::span(one.slots).first(1), 80);
  CHECK(single.exhausted);
  CHECK(single.plays[0] == 50);
}

TEST_CASE("sample_by_plays follows the play-count law") {
  Rng rng(9);
  const std::vector<Rounds> plays{30, 70};
  int second = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) second += sample_by_plays(plays, rng) == 1;
  // 4 standard errors of a 0.7 Bernoulli frequency.
  CHECK(std::fabs(second / double(draws) - 0.7) < 4 * std::sqrt(0.21 / draws));
  const std::vector<Rounds> none{0, 0, 0};
  for (int i = 0; i < 10; ++i) CHECK(sample_by_plays(none, rng) < 3);
}

TEST_CASE("find_best") {
  Arena arena = open_arena(make_instance({0.4, 0.6}, identity_orders(2, 1)), 10, 3);
  const auto res = find_best(arena.env, std::span(arena.slots).first(1), 10);
  CHECK(res.index == 0);
  CHECK(res.slot == arena.slots[0]);
  CHECK_THROWS_AS(find_best(arena.env, std::span<const SlotId>{}, 10), DomainError);

  // Two arms 0.9 vs 0.1, L = 10^4: mean gap within sqrt(2*2/L) + 3 SE.
  const int reps = 300;
  double sum = 0, sq = 0;
  for (int r = 0; r < reps; ++r) {
    Arena a = open_arena(make_instance({0.9, 0.1}, identity_orders(2, 1)), 10000, derive_seed(8, r));
    const auto fb = find_best(a.env, a.slots, 10000);
    const double gap = fb.index == 0 ? 0.0 : 0.8;
    sum += gap;
    sq += gap * gap;
  }
  const double mean = sum / reps;
  const double se = std::sqrt(std::max(0.0, sq / reps - mean * mean) / (reps - 1));
  CHECK(mean <= std::sqrt(4.0 / 10000) + 3 * se);
}
