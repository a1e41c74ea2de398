#include "smab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "smab/algos_large.hpp"
#include "smab/algos_small.hpp"
#include "smab/bar.hpp"
#include "smab/baseline.hpp"
#include "smab/errors.hpp"

namespace smab {

std::string to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::LargeSimple: return "large-simple";
    case AlgorithmId::LargeGeneral: return "large-general";
    case AlgorithmId::Small: return "small";
    case AlgorithmId::Uniform: return "uniform";
    case AlgorithmId::Bai: return "bai";
    case AlgorithmId::Bar: return "bar";
  }
  return "unknown";
}

AlgorithmId parse_algorithm(const std::string& name) {
  for (AlgorithmId id : {AlgorithmId::LargeSimple, AlgorithmId::LargeGeneral, AlgorithmId::Small,
                         AlgorithmId::Uniform, AlgorithmId::Bai, AlgorithmId::Bar}) {
    if (to_string(id) == name) return id;
  }
  throw ConfigError("unknown algorithm '" + name +
                    "' (expected auto, large-simple, large-general, small, uniform, bai or bar)");
}

AlgorithmId select_algorithm(int n, int m) {
  if (m < 2) throw ConfigError("memory m must be >= 2 (got m=" + std::to_string(m) + ")");
  if (m >= n) {
    throw ConfigError("need m < n (got m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  }
  return 9LL * m >= 8LL * n ? AlgorithmId::LargeGeneral : AlgorithmId::Small;
}

std::string GridPoint::key() const {
  return to_string(algorithm) + "|n=" + std::to_string(n) + "|m=" + std::to_string(m) +
         "|P=" + std::to_string(passes) + "|T=" + std::to_string(horizon);
}

std::vector<GridPoint> expand_grid(const Experiment& exp) {
  if (exp.reps < 1) throw ConfigError("reps must be >= 1");
  if (exp.n.empty() || exp.m.empty() || exp.passes.empty() || exp.horizon.empty()) {
    throw ConfigError("grid lists n, m, P and T must be nonempty");
  }
  std::vector<GridPoint> grid;
  for (int n : exp.n)
    for (int m : exp.m)
      for (int p : exp.passes)
        for (Rounds t : exp.horizon) {
          GridPoint g;
          g.algorithm = exp.algorithm == "auto" ? select_algorithm(n, m) : parse_algorithm(exp.algorithm);
          g.n = n;
          g.m = m;
          g.passes = p;
          g.horizon = t;
          grid.push_back(g);
        }
  return grid;
}

Seed run_seed(Seed base, const GridPoint& point, int variant, int rep) {
  const Seed point_seed = derive_seed(base, fnv1a(point.key()));
  return derive_seed(derive_seed(point_seed, static_cast<std::uint64_t>(variant)),
                     static_cast<std::uint64_t>(rep));
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SMAB_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(resolve_jobs(jobs), static_cast<int>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        if (stop.load()) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          stop = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / double(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.se = std::sqrt(ss / double(values.size() - 1)) / std::sqrt(double(values.size()));
  }
  return s;
}

ExponentFit estimate_exponent(const std::vector<std::pair<double, double>>& points) {
  ExponentFit fit;
  std::vector<double> xs, ys;
  std::set<double> seen;
  for (const auto& [t, regret] : points) {
    if (!(t > 0.0)) throw ConfigError("estimate_exponent: T values must be positive");
    if (!seen.insert(t).second) throw ConfigError("estimate_exponent: T values must be distinct");
    if (!(regret > 0.0)) {
      fit.warnings.push_back("dropped point T=" + std::to_string(t) + " with nonpositive regret");
      continue;
    }
    xs.push_back(std::log(t));
    ys.push_back(std::log(regret));
  }
  if (xs.size() < 3) {
    throw ConfigError("estimate_exponent: need at least 3 usable points, have " +
                      std::to_string(xs.size()));
  }
  const double k = double(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    rss += r * r;
  }
  fit.stderr_ = std::sqrt(rss / (k - 2.0) / sxx);
  fit.used = xs.size();
  return fit;
}

namespace {

InstanceSpec build_instance(const Experiment& exp, const GridPoint& g, int variant, Seed seed) {
  const Seed iseed = derive_seed(seed, 7);
  const int n = g.n;
  const int passes = g.passes;
  const std::string& kind = exp.instance;
  if (kind == "hard-worst" || kind == "hard") {
    const int level = kind == "hard-worst" || exp.hard_level < 0 ? passes : exp.hard_level;
    HardFamily family;
    family.kind = HardKind::Hjp;
    family.j = kind == "hard-worst" ? variant : exp.hard_j;
    family.p = level;
    family.eps.push_back(0.5);
    for (double e : lower_bound_eps(n, g.m, passes, static_cast<double>(g.horizon), exp.c1,
                                    RegimeCheck::Ignore)) {
      family.eps.push_back(e);
    }
    try {
      return hard_instance(family, n, passes, iseed);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (kind == "h0") return hard_instance(HardFamily{}, n, passes, iseed);
  Rng rng(iseed);
  if (kind == "gap") {
    const auto best = static_cast<ArmId>(1 + uniform_below(rng, static_cast<std::uint64_t>(n)));
    return make_instance(single_gap_means(n, best, 0.5, exp.gap), random_orders(n, passes, derive_seed(iseed, 1)));
  }
  if (kind == "gap-last") {
    return make_instance(single_gap_means(n, n, 0.5, exp.gap), identity_orders(n, passes));
  }
  if (kind == "random") {
    std::vector<double> means(static_cast<std::size_t>(n));
    for (double& v : means) v = uniform01(rng);
    return make_instance(std::move(means), random_orders(n, passes, derive_seed(iseed, 1)));
  }
  throw ConfigError("unknown instance kind '" + kind +
                    "' (expected hard-worst, hard, h0, gap, gap-last or random)");
}

RunOutcome condense(const RunRecord& rec) {
  RunOutcome out;
  out.pseudo_regret = rec.pseudo_regret;
  out.pass_rounds = rec.pass_rounds;
  out.violation = rec.violation;
  out.violation_kind = rec.violation_kind;
  out.truncated = rec.truncated;
  for (double k : rec.king_means) out.king_gaps.push_back(rec.best_mean - k);
  if (rec.output_mean) out.output_gap = rec.best_mean - *rec.output_mean;
  out.rounds_used = rec.rounds_used;
  out.samples = rec.rounds_used;
  return out;
}

std::vector<int> variants_of(const Experiment& exp, const GridPoint& g) {
  if (exp.instance == "hard-worst") {
    std::vector<int> v(static_cast<std::size_t>(g.n));
    for (int j = 1; j <= g.n; ++j) v[static_cast<std::size_t>(j - 1)] = j;
    return v;
  }
  return {0};
}

}  // namespace

RunOutcome run_once(const Experiment& exp, const GridPoint& g, int variant, int rep, Seed seed) {
  InstanceSpec instance = build_instance(exp, g, variant, seed);
  const Rounds budget = exp.explore_only ? kOpenBudget : g.horizon;
  RunOutcome out;
  try {
    switch (g.algorithm) {
      case AlgorithmId::LargeSimple:
      case AlgorithmId::LargeGeneral: {
        const auto variant_kind = g.algorithm == AlgorithmId::LargeSimple ? LargeVariant::SimpleNm1
                                                                          : LargeVariant::General;
        auto config = make_large_config(variant_kind, g.n, g.m, g.passes, g.horizon);
        config.explore_only = exp.explore_only;
        StreamEnv env(std::move(instance), g.passes, budget, g.m, seed,
                      variant_kind == LargeVariant::SimpleNm1 ? RecallMode::DroppedThisPass
                                                              : RecallMode::Strict);
        out = condense(variant_kind == LargeVariant::SimpleNm1 ? run_large_simple(env, config)
                                                               : run_large_general(env, config));
        break;
      }
      case AlgorithmId::Small: {
        auto config = make_small_config(g.n, g.m, g.passes, g.horizon, exp.delta);
        config.explore_only = exp.explore_only;
        StreamEnv env(std::move(instance), g.passes, budget, g.m, seed);
        out = condense(run_small(env, config));
        break;
      }
      case AlgorithmId::Uniform: {
        StreamEnv env(std::move(instance), 1, g.horizon, std::max(2, g.n), seed);
        out = condense(run_uniform(env));
        break;
      }
      case AlgorithmId::Bai: {
        const int r = exp.levels > 0 ? exp.levels
                                     : std::min(log_star(static_cast<double>(g.n)), g.m - 1);
        StreamEnv env(std::move(instance), 1, kOpenBudget, g.m, seed);
        const auto res = run_bai_stream(env, r, exp.eps, exp.delta);
        out = condense(res.record);
        out.samples = res.samples;
        out.sample_bound = res.sample_bound;
        break;
      }
      case AlgorithmId::Bar: {
        const auto config = make_bar_config(g.n, g.m, exp.eps0, exp.eps1);
        Arena arena = open_arena(std::move(instance), config.L1 + config.L2, seed);
        run_bar(arena.env, config, g.m);
        out = condense(arena.env.finish());
        break;
      }
    }
  } catch (const RefereeViolation& v) {
    out.violation = true;
    out.violation_kind = std::string(to_string(v.kind()));
    out.error = v.what();
  } catch (const UsageError& e) {
    out.violation = true;
    out.error = e.what();
  } catch (const NumericError& e) {
    out.error = e.what();
  }
  out.variant = variant;
  out.rep = rep;
  out.seed = seed;
  return out;
}

Summary simulate(const Experiment& exp) {
  Summary summary;
  summary.experiment = exp;
  const auto grid = expand_grid(exp);

  struct Task {
    int point;
    int variant;
    int rep;
  };
  std::vector<Task> tasks;
  std::vector<std::vector<int>> variants;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    variants.push_back(variants_of(exp, grid[p]));
    for (int v : variants.back())
      for (int r = 0; r < exp.reps; ++r) tasks.push_back({int(p), v, r});
  }
  // Surface configuration errors once, before spawning workers.
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto& g = grid[p];
    if (g.algorithm == AlgorithmId::LargeSimple || g.algorithm == AlgorithmId::LargeGeneral) {
      std::vector<std::string> warns;
      make_large_config(g.algorithm == AlgorithmId::LargeSimple ? LargeVariant::SimpleNm1
                                                                : LargeVariant::General,
                        g.n, g.m, g.passes, g.horizon, &warns);
      for (auto& w : warns) summary.warnings.push_back(g.key() + ": " + w);
    } else if (g.algorithm == AlgorithmId::Small) {
      make_small_config(g.n, g.m, g.passes, g.horizon, exp.delta);
    } else if (g.algorithm == AlgorithmId::Bar) {
      make_bar_config(g.n, g.m, exp.eps0, exp.eps1);
    }
    build_instance(exp, g, variants[p].front(), 0);
  }

  summary.runs.resize(tasks.size());
  parallel_for(tasks.size(), exp.jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    const auto& g = grid[static_cast<std::size_t>(t.point)];
    RunOutcome o = run_once(exp, g, t.variant, t.rep, run_seed(exp.seed, g, t.variant, t.rep));
    o.point = t.point;
    summary.runs[i] = std::move(o);
  });

  std::size_t cursor = 0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    PointSummary ps;
    ps.point = grid[p];
    ps.reps = exp.reps;
    const auto& vars = variants[p];
    std::size_t worst_begin = cursor;
    double worst_mean = -std::numeric_limits<double>::infinity();
    for (int v : vars) {
      std::vector<double> regrets;
      for (int r = 0; r < exp.reps; ++r) {
        const RunOutcome& o = summary.runs[cursor + std::size_t(r)];
        regrets.push_back(o.pseudo_regret);
        if (o.violation || !o.error.empty()) ++ps.violations;
        if (o.truncated) ++ps.truncated;
        ps.max_samples = std::max(ps.max_samples, o.samples);
        ps.sample_bound = std::max(ps.sample_bound, o.sample_bound);
      }
      const Stat s = summarize(regrets);
      if (s.mean > worst_mean) {
        worst_mean = s.mean;
        ps.regret = s;
        ps.worst_variant = v;
        worst_begin = cursor;
      }
      cursor += std::size_t(exp.reps);
    }
    const std::size_t passes = static_cast<std::size_t>(ps.point.passes);
    ps.mean_pass_rounds.assign(passes, 0.0);
    std::vector<std::vector<double>> kings(passes);
    std::vector<double> outputs;
    for (int r = 0; r < exp.reps; ++r) {
      const RunOutcome& o = summary.runs[worst_begin + std::size_t(r)];
      for (std::size_t q = 0; q < passes && q < o.pass_rounds.size(); ++q) {
        ps.mean_pass_rounds[q] += double(o.pass_rounds[q]) / exp.reps;
      }
      for (std::size_t q = 0; q < passes && q < o.king_gaps.size(); ++q) {
        if (!std::isnan(o.king_gaps[q])) kings[q].push_back(o.king_gaps[q]);
      }
      if (o.output_gap) outputs.push_back(*o.output_gap);
    }
    for (auto& k : kings) ps.king_gap.push_back(summarize(k));
    if (!outputs.empty()) ps.output_gap = summarize(outputs);
    summary.points.push_back(std::move(ps));
  }

  std::map<std::tuple<int, int, int, int>, std::vector<std::pair<double, double>>> groups;
  for (const auto& ps : summary.points) {
    const auto& g = ps.point;
    groups[{int(g.algorithm), g.n, g.m, g.passes}].emplace_back(double(g.horizon), ps.regret.mean);
  }
  for (const auto& [key, pts] : groups) {
    std::set<double> ts;
    for (const auto& pt : pts) ts.insert(pt.first);
    if (ts.size() < 3 || ts.size() != pts.size()) continue;
    FitSummary fs;
    fs.algorithm = static_cast<AlgorithmId>(std::get<0>(key));
    fs.n = std::get<1>(key);
    fs.m = std::get<2>(key);
    fs.passes = std::get<3>(key);
    fs.target = regret_exponent(fs.passes);
    try {
      fs.fit = estimate_exponent(pts);
    } catch (const ConfigError& e) {
      summary.warnings.push_back(std::string("exponent fit skipped: ") + e.what());
      continue;
    }
    for (auto& w : fs.fit.warnings) summary.warnings.push_back(w);
    summary.fits.push_back(std::move(fs));
  }
  return summary;
}

}  // namespace smab
