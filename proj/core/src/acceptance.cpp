#include "smab/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "smab/algos_large.hpp"
#include "smab/algos_small.hpp"
#include "smab/bar.hpp"
#include "smab/errors.hpp"
#include "smab/experiment_io.hpp"
#include "smab/harness.hpp"
#include "smab/instances.hpp"
#include "smab/osmd.hpp"

namespace smab {
namespace {

// Fixed tolerances of the battery.
constexpr double kSeMultiplier = 3.0;
constexpr double kSlopeTolerance = 0.08;
constexpr int kFuzzConfigurations = 10000;

struct Verdict {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    note(ok ? what : "FAILED " + what);
  }
  void note(const std::string& what) {
    if (detail.tellp() != 0) detail << "; ";
    detail << what;
  }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

Experiment base_experiment(const AcceptanceOptions& opt) {
  Experiment e;
  e.seed = opt.seed;
  e.jobs = opt.jobs;
  return e;
}

// OSMD or FindBest on a 0.4-gap arena of k arms (arm k is best).
Stat arena_stat(int k, Rounds rounds, int reps, Seed seed, int jobs, bool find) {
  std::vector<double> values(static_cast<std::size_t>(reps));
  const auto means = single_gap_means(k, k, 0.5, 0.4);
  parallel_for(values.size(), jobs, [&](std::size_t i) {
    const Seed s = derive_seed(derive_seed(seed, std::uint64_t(k) * 1000003u + std::uint64_t(rounds)), i);
    Arena arena = open_arena(make_instance(means, identity_orders(k, 1)), rounds, s);
    if (find) {
      const FindBestResult res = find_best(arena.env, arena.slots, rounds);
      const std::array<SlotId, 1> out{res.slot};
      arena.env.declare_output(out);
      const RunRecord rec = arena.env.finish();
      values[i] = rec.best_mean - *rec.output_mean;
    } else {
      run_mirror_descent(arena.env, arena.slots, rounds);
      values[i] = arena.env.finish().pseudo_regret;
    }
  });
  return summarize(values);
}

bool clean(const Summary& s) {
  for (const auto& p : s.points) {
    if (p.violations != 0) return false;
  }
  return true;
}

void c1_referee(const AcceptanceOptions& opt, Verdict& v) {
  const FuzzReport rep = fuzz_referee(kFuzzConfigurations, derive_seed(opt.seed, 1), opt.jobs);
  v.require(rep.configurations >= kFuzzConfigurations,
            std::to_string(rep.configurations) + " configurations");
  v.require(rep.violations == 0, std::to_string(rep.violations) + " violations");
  v.require(rep.audit_failures == 0, std::to_string(rep.audit_failures) + " audit failures");
  v.require(rep.errors == 0, std::to_string(rep.errors) + " errors");
  for (const auto& d : rep.details) v.note(d);
  const ControlReport ctl = run_negative_controls(opt.seed);
  v.require(ctl.hoarder, "hoarder caught");
  v.require(ctl.over_pull, "over-pull caught");
  v.require(ctl.stale, "stale handle caught");
}

void c2_osmd_bound(const AcceptanceOptions& opt, Verdict& v) {
  for (int k : {2, 5, 10}) {
    for (Rounds L : {Rounds{1000}, Rounds{10000}}) {
      const Stat s = arena_stat(k, L, 2000, derive_seed(opt.seed, 2), opt.jobs, false);
      const double bound = std::sqrt(2.0 * k * double(L));
      v.require(s.mean <= bound + kSeMultiplier * s.se,
                fmt("|S|=%g L=%g regret %.2f (se %.2f)", k, double(L), s.mean, s.se) +
                    fmt(" bound %.2f", bound));
    }
  }
}

void c3_findbest(const AcceptanceOptions& opt, Verdict& v) {
  for (int k : {2, 5, 10}) {
    for (Rounds L : {Rounds{1000}, Rounds{10000}}) {
      const Stat s = arena_stat(k, L, 5000, derive_seed(opt.seed, 3), opt.jobs, true);
      const double bound = std::sqrt(2.0 * k / double(L));
      v.require(s.mean <= bound + kSeMultiplier * s.se,
                fmt("|S|=%g L=%g gap %.4f (se %.4f)", k, double(L), s.mean, s.se) +
                    fmt(" bound %.4f", bound));
    }
  }
}

void c4_large_kings(const AcceptanceOptions& opt, Verdict& v) {
  constexpr Rounds T = 1000000;
  for (int n : {9, 18}) {
    std::vector<int> ms{n - 1, (8 * n + 8) / 9};
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    for (int m : ms) {
      for (int P : {1, 2}) {
        Experiment e = base_experiment(opt);
        // Arm 1 starts in memory and can be dropped; arms read after the first
        // FindBest are always resident.
        e.instance = "hard";
        e.hard_j = 1;
        e.n = {n};
        e.m = {m};
        e.passes = {P};
        e.horizon = {T};
        e.reps = 3000;
        e.explore_only = true;
        const Summary s = simulate(e);
        v.require(clean(s), "no violations n=" + std::to_string(n) + " m=" + std::to_string(m));
        const auto cfg = make_large_config(LargeVariant::General, n, m, P, T);
        for (int p = 1; p <= P; ++p) {
          const Rounds L = p == 1 ? cfg.schedule.L1 : cfg.schedule.second_findbest(p);
          const double eps = std::sqrt(double(n - m) / double(L));
          const double bound = 10.0 * (n - m) * eps / m;
          const Stat& k = s.points[0].king_gap[std::size_t(p - 1)];
          v.require(k.count == 3000 && k.mean <= bound + kSeMultiplier * k.se,
                    fmt("n=%g m=%g P=%g", n, m, P) +
                        fmt(" pass %g king gap %.5f (se %.5f) bound %.5f", p, k.mean, k.se, bound));
        }
      }
    }
  }
}

void c5_small_kings(const AcceptanceOptions& opt, Verdict& v) {
  constexpr int n = 18;
  constexpr Rounds T = Rounds(n + 1) * (n + 1) * 64;
  for (int m : {2, 5}) {
    for (int P : {1, 2}) {
      Experiment e = base_experiment(opt);
      e.instance = "hard";
      e.hard_j = n;
      e.n = {n};
      e.m = {m};
      e.passes = {P};
      e.horizon = {T};
      e.reps = 3000;
      e.explore_only = true;
      const Summary s = simulate(e);
      v.require(clean(s), "no violations m=" + std::to_string(m));
      const auto cfg = make_small_config(n, m, P, T);
      for (int p = 1; p <= P; ++p) {
        const double bound = 2.0 * cfg.schedule.eps[std::size_t(p)];
        const Stat& k = s.points[0].king_gap[std::size_t(p - 1)];
        v.require(k.count == 3000 && k.mean <= bound + kSeMultiplier * k.se,
                  fmt("m=%g P=%g pass %g", m, P, p) +
                      fmt(" king gap %.5f (se %.5f) bound %.5f", k.mean, k.se, bound));
      }
    }
  }
}

void c6_bai(const AcceptanceOptions& opt, Verdict& v) {
  for (double eps : {0.05, 0.1}) {
    Experiment e = base_experiment(opt);
    e.algorithm = "bai";
    e.instance = "gap";
    e.gap = 0.2;
    e.n = {50};
    e.m = {3};
    e.horizon = {1};
    e.eps = eps;
    e.levels = 2;
    e.reps = 2000;
    const Summary s = simulate(e);
    const PointSummary& p = s.points[0];
    v.require(clean(s), "no violations");
    v.require(p.output_gap && p.output_gap->mean <= eps + kSeMultiplier * p.output_gap->se,
              fmt("eps=%g gap %.5f (se %.5f)", eps, p.output_gap ? p.output_gap->mean : NAN,
                  p.output_gap ? p.output_gap->se : NAN));
    v.require(p.sample_bound > 0 && p.max_samples <= p.sample_bound,
              fmt("eps=%g max samples %.0f bound %.0f", eps, double(p.max_samples),
                  double(p.sample_bound)));
  }
}

void c7_bar(const AcceptanceOptions& opt, Verdict& v) {
  constexpr int n = 18, m = 16;
  for (double eps0 : {0.3, 0.5}) {
    for (double eps1 : {0.1, 0.2}) {
      Experiment e = base_experiment(opt);
      e.algorithm = "bar";
      e.instance = "random";
      e.n = {n};
      e.m = {m};
      e.horizon = {1};
      e.eps0 = eps0;
      e.eps1 = eps1;
      e.reps = 5000;
      const Summary s = simulate(e);
      const PointSummary& p = s.points[0];
      const auto cfg = make_bar_config(n, m, eps0, eps1);
      const double bound = std::max(2.0 * (n - m) * eps1 / n, 2.0 * (n - m) * eps1 / m);
      v.require(clean(s), "no violations");
      v.require(p.output_gap && p.output_gap->mean <= bound + kSeMultiplier * p.output_gap->se,
                fmt("eps0=%g eps1=%g gap %.5f bound %.5f", eps0, eps1,
                    p.output_gap ? p.output_gap->mean : NAN, bound));
      bool exact = true;
      for (const auto& r : s.runs) exact = exact && r.rounds_used == cfg.L1 + cfg.L2;
      v.require(exact, fmt("pulls == L1 + L2 = %.0f", double(cfg.L1 + cfg.L2)));
    }
  }
}

void c8_scaling(const AcceptanceOptions& opt, Verdict& v) {
  Experiment e = base_experiment(opt);
  e.instance = "hard-worst";
  e.n = {9};
  e.m = {8};
  e.passes = {1, 2};
  e.horizon.clear();
  for (int b = 14; b <= 20; ++b) e.horizon.push_back(Rounds{1} << b);
  e.reps = 1000;
  const Summary s = simulate(e);
  v.require(clean(s), "no violations");
  double slope[3] = {NAN, NAN, NAN};
  for (const auto& f : s.fits) {
    if (f.passes < 1 || f.passes > 2) continue;
    slope[f.passes] = f.fit.slope;
    v.require(std::fabs(f.fit.slope - f.target) <= kSlopeTolerance,
              fmt("P=%g slope %.4f (se %.4f) target %.4f", f.passes, f.fit.slope, f.fit.stderr_,
                  f.target));
  }
  v.require(!std::isnan(slope[1]) && !std::isnan(slope[2]), "both fits present");
  v.require(slope[2] < slope[1], fmt("P=2 slope %.4f below P=1 slope %.4f", slope[2], slope[1]));
}

void c9_zero_regret(const AcceptanceOptions& opt, Verdict& v) {
  struct Case {
    const char* alg;
    int n, m, P;
    Rounds T;
  };
  const Case cases[] = {
      {"large-simple", 10, 9, 2, 200000}, {"large-general", 9, 8, 2, 200000},
      {"large-general", 18, 16, 1, 50000}, {"small", 18, 5, 2, 200000},
      {"small", 18, 2, 1, 50000},         {"uniform", 6, 6, 1, 5000},
      {"bai", 50, 3, 1, 1},               {"bar", 18, 16, 1, 1},
  };
  for (const char* kind : {"gap", "h0"}) {
    for (const Case& c : cases) {
      Experiment e = base_experiment(opt);
      e.algorithm = c.alg;
      e.instance = kind;
      e.gap = 0.0;
      e.n = {c.n};
      e.m = {c.m};
      e.passes = {c.P};
      e.horizon = {c.T};
      e.reps = 20;
      const Summary s = simulate(e);
      bool zero = clean(s);
      for (const auto& r : s.runs) zero = zero && r.pseudo_regret == 0.0;
      v.require(zero, std::string(c.alg) + " on " + kind + " n=" + std::to_string(c.n) +
                          " m=" + std::to_string(c.m) + " P=" + std::to_string(c.P));
    }
  }
}

void c10_reproducible(const AcceptanceOptions& opt, Verdict& v) {
  std::vector<Experiment> exps;
  {
    Experiment e = base_experiment(opt);
    e.n = {9};
    e.m = {8};
    e.passes = {1, 2};
    e.horizon = {1 << 14, 1 << 15, 1 << 16};
    e.reps = 20;
    exps.push_back(e);
  }
  {
    Experiment e = base_experiment(opt);
    e.instance = "random";
    e.n = {18};
    e.m = {5};
    e.passes = {2};
    e.horizon = {100000};
    e.reps = 30;
    exps.push_back(e);
  }
  // The embedded config line records the job count, so rows are compared across job counts.
  auto rows = [](const std::string& csv) { return csv.substr(csv.find('\n') + 1); };
  for (Experiment e : exps) {
    e.jobs = 1;
    const std::string a = summary_csv(simulate(e));
    const std::string b = summary_csv(simulate(e));
    e.jobs = 3;
    const std::string c = summary_csv(simulate(e));
    v.require(a == b, "same seed, same CSV (" + std::to_string(a.size()) + " bytes)");
    v.require(rows(a) == rows(c), "jobs 1 and 3 give identical rows");
  }
}

using Body = void (*)(const AcceptanceOptions&, Verdict&);

struct Criterion {
  int id;
  const char* name;
  Body body;
};

const Criterion kCriteria[] = {
    {1, "referee-integrity", c1_referee},  {2, "osmd-regret-bound", c2_osmd_bound},
    {3, "findbest-gap", c3_findbest},      {4, "large-memory-king", c4_large_kings},
    {5, "small-memory-king", c5_small_kings}, {6, "bai-pac-and-cap", c6_bai},
    {7, "bar-retention", c7_bar},          {8, "scaling-exponent", c8_scaling},
    {9, "zero-regret", c9_zero_regret},    {10, "reproducibility", c10_reproducible},
};

}  // namespace

std::vector<std::pair<int, std::string>> acceptance_criteria() {
  std::vector<std::pair<int, std::string>> out;
  for (const auto& c : kCriteria) out.emplace_back(c.id, c.name);
  return out;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log) {
  std::vector<CriterionResult> results;
  for (const auto& c : kCriteria) {
    if (!options.only.empty() && !options.only.count(c.id)) continue;
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(options, v);
    } catch (const std::exception& e) {
      v.require(false, std::string("raised: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed = v.passed;
    r.detail = v.detail.str();
    log << (r.passed ? "PASS" : "FAIL") << " C" << r.id << " " << r.name << " ("
        << fmt("%.1f", r.seconds) << "s): " << r.detail << "\n";
    log.flush();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace smab
