#include "smab/osmd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smab/errors.hpp"

namespace smab {
namespace {

constexpr double kSumTolerance = 1e-10;
constexpr double kProbabilityFloor = 1e-12;
constexpr int kMaxIterations = 200;

std::size_t sample_from(std::span<const double> q, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    acc += q[i];
    if (u < acc) return i;
  }
  return q.size() - 1;
}

void sync_root(MdState& st) {
  const std::size_t k = st.q.size();
  bool ok = st.root.size() == k;
  for (std::size_t i = 0; ok && i < k; ++i) ok = st.root[i] * st.root[i] == st.q[i];
  if (ok) return;
  st.root.resize(k);
  for (std::size_t i = 0; i < k; ++i) st.root[i] = std::sqrt(st.q[i]);
}

// Finds nu with sum (b_i - nu)^-2 = 1 and writes q' and sqrt(q').
// f(nu) = sum (b_i - nu)^-2 - 1 is increasing and convex on (-inf, min b).
// `guess` is a starting point; it is replaced when outside the bracket.
void project(MdState& st, const double* base, double* r, double guess) {
  const std::size_t k = st.q.size();
  double bmin = HUGE_VAL;
  for (std::size_t i = 0; i < k; ++i) bmin = std::min(bmin, base[i]);
  double lo = bmin - std::sqrt(static_cast<double>(k));
  double hi = bmin;
  double x = guess;
  if (!(lo < x && x < hi)) x = (lo < 0.0 && 0.0 < hi) ? 0.0 : 0.5 * (lo + hi);
  double f = 0.0;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    for (std::size_t i = 0; i < k; ++i) r[i] = 1.0 / (base[i] - x);
    double s2 = 0.0, s3 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double r2 = r[i] * r[i];
      s2 += r2;
      s3 += r2 * r[i];
    }
    f = s2 - 1.0;
    if (std::fabs(f) <= kSumTolerance) break;
    if (f > 0.0) hi = x; else lo = x;
    if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(x))) break;
    double next = x - f / (2.0 * s3);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  if (!(std::fabs(f) <= 1e-8)) {
    std::ostringstream msg;
    msg << "md_step: normalizer search failed after " << iter << " iterations (k=" << k
        << ", residual=" << f << ", bracket=[" << lo << ", " << hi << "])";
    throw NumericError(msg.str());
  }
  bool floored = false;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double qi = r[i] * r[i];
    if (qi < kProbabilityFloor) {
      qi = kProbabilityFloor;
      r[i] = std::sqrt(qi);
      floored = true;
    }
    st.q[i] = qi;
    st.root[i] = r[i];
    total += qi;
  }
  if (floored || std::fabs(total - 1.0) > kSumTolerance) {
    const double scale = 1.0 / std::sqrt(total);
    for (std::size_t i = 0; i < k; ++i) {
      st.root[i] *= scale;
      st.q[i] = st.root[i] * st.root[i];
    }
  }
}

// First-order root of f around the current point, where base_i = 1/s_i + d_i:
// sum s^2 (1 - 2 s (d - nu)) = 1 gives nu = sum s^3 d / sum s^3.
double linear_guess(std::span<const double> root, const double* delta) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const double s3 = root[i] * root[i] * root[i];
    num += s3 * delta[i];
    den += s3;
  }
  return den > 0.0 ? num / den : 0.0;
}

void observe_synced(MdState& state, std::size_t chosen, double loss) {
  const std::size_t k = state.q.size();
  const double qc = state.q[chosen];
  if (!(qc > 0.0)) throw NumericError("loss_estimator: chosen arm has zero probability");
  const double eta = state.eta;
  const double eta8 = eta / 8.0;
  const double shift = eta * eta8 * qc;
  const double* root = state.root.data();
  double base[32] = {}, delta[32];
  // 1/(q + sqrt q) = 1/(s (1 + s)); 1/s = (1 + s) * that.
  for (std::size_t i = 0; i < k; ++i) base[i] = 1.0 / (root[i] * (1.0 + root[i]));
  const double t_chosen = base[chosen];
  for (std::size_t i = 0; i < k; ++i) {
    delta[i] = -shift * base[i];
    base[i] = (1.0 + root[i]) * base[i] + delta[i];
  }
  const double own = eta * (loss - 0.5 + eta8 * (1.0 + t_chosen));
  delta[chosen] += own;
  base[chosen] += own;
  project(state, base, delta, linear_guess(state.root, delta));
}

template <typename F>
void with_scratch(std::size_t k, F&& body) {
  if (k <= 32) {
    double base[32], r[32];
    body(base, r);
  } else {
    std::vector<double> base(k), r(k);
    body(base.data(), r.data());
  }
}

}  // namespace

MdState md_init(std::size_t k, Rounds rounds) {
  if (k < 1) throw DomainError("md_init: need at least one arm");
  if (rounds < 1) throw DomainError("md_init: need L >= 1");
  MdState st;
  st.q.assign(k, 1.0 / static_cast<double>(k));
  st.eta = std::sqrt(8.0 / static_cast<double>(rounds));
  st.plays.assign(k, 0);
  st.rounds_total = rounds;
  sync_root(st);
  return st;
}

void loss_estimator_into(const MdState& state, std::size_t chosen, double loss,
                         std::span<double> out) {
  const double qc = state.q.at(chosen);
  if (!(qc > 0.0)) throw NumericError("loss_estimator: chosen arm has zero probability");
  const double eta8 = state.eta / 8.0;
  for (std::size_t i = 0; i < state.q.size(); ++i) {
    const double qi = state.q[i];
    const double denom = qi + std::sqrt(qi);
    double v = -eta8 * qc / denom;
    if (i == chosen) v += loss - 0.5 + eta8 * (1.0 + 1.0 / denom);
    out[i] = v;
  }
}

std::vector<double> loss_estimator(const MdState& state, std::size_t chosen, double loss) {
  std::vector<double> out(state.q.size());
  loss_estimator_into(state, chosen, loss, out);
  return out;
}

void md_step(MdState& state, std::span<const double> estimator) {
  const std::size_t k = state.q.size();
  if (estimator.size() != k) throw DomainError("md_step: estimator size mismatch");
  if (k == 1) return;
  sync_root(state);
  with_scratch(k, [&](double* base, double* r) {
    for (std::size_t i = 0; i < k; ++i) {
      r[i] = state.eta * estimator[i];
      base[i] = 1.0 / state.root[i] + r[i];
    }
    project(state, base, r, linear_guess(state.root, r));
  });
}

void md_observe(MdState& state, std::size_t chosen, double loss) {
  const std::size_t k = state.q.size();
  if (k == 1) return;
  if (chosen >= k) throw DomainError("md_observe: arm index out of range");
  sync_root(state);
  if (k <= 32) {
    observe_synced(state, chosen, loss);
    return;
  }
  std::vector<double> est(k);
  loss_estimator_into(state, chosen, loss, est);
  md_step(state, est);
}

MdState run_mirror_descent(StreamEnv& env, std::span<const SlotId> slots, Rounds rounds) {
  MdState st = md_init(slots.size(), rounds);
  const std::size_t k = slots.size();
  Rng& rng = env.player_rng();
  if (k == 1) {
    // q stays at 1; only the pulls matter.
    const Rounds before = env.rounds_used();
    try {
      env.pull_repeated(slots[0], rounds);
    } catch (const GameOver&) {
      st.exhausted = true;
    }
    st.rounds_done = st.plays[0] = env.rounds_used() - before;
    return st;
  }
  const bool small = k <= 32;
  for (Rounds t = 0; t < rounds; ++t) {
    const std::size_t a = sample_from(st.q, rng);
    int reward = 0;
    try {
      reward = env.pull(slots[a]);
    } catch (const GameOver&) {
      st.exhausted = true;
      break;
    }
    ++st.plays[a];
    ++st.rounds_done;
    if (small) {
      observe_synced(st, a, 1.0 - reward);
    } else {
      md_observe(st, a, 1.0 - reward);
    }
  }
  return st;
}

std::size_t sample_by_plays(std::span<const Rounds> plays, Rng& rng) {
  Rounds total = 0;
  for (Rounds p : plays) total += p;
  if (total <= 0) return static_cast<std::size_t>(uniform_below(rng, plays.size()));
  const auto u = static_cast<Rounds>(uniform_below(rng, static_cast<std::uint64_t>(total)));
  Rounds acc = 0;
  for (std::size_t i = 0; i < plays.size(); ++i) {
    acc += plays[i];
    if (u < acc) return i;
  }
  return plays.size() - 1;
}

FindBestResult find_best(StreamEnv& env, std::span<const SlotId> slots, Rounds rounds) {
  if (slots.empty()) throw DomainError("find_best: empty arm set");
  const MdState st = run_mirror_descent(env, slots, rounds);
  FindBestResult out;
  out.index = sample_by_plays(st.plays, env.player_rng());
  out.slot = slots[out.index];
  out.exhausted = st.exhausted;
  return out;
}

}  // namespace smab
