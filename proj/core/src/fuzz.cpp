#include <algorithm>
#include <cmath>
#include <mutex>

#include "smab/algos_large.hpp"
#include "smab/algos_small.hpp"
#include "smab/bar.hpp"
#include "smab/baseline.hpp"
#include "smab/errors.hpp"
#include "smab/harness.hpp"

namespace smab {
namespace {

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

InstanceSpec fuzz_instance(Rng& rng, int n, int passes) {
  std::vector<double> means(static_cast<std::size_t>(n));
  switch (uniform_below(rng, 3)) {
    case 0:
      for (double& v : means) v = uniform01(rng);
      break;
    case 1:
      std::fill(means.begin(), means.end(), 0.5);
      break;
    default:
      means = single_gap_means(n, uniform_int(rng, 1, n), 0.5, 0.5 * uniform01(rng));
  }
  return make_instance(std::move(means), random_orders(n, passes, rng()));
}

struct FuzzCase {
  std::string description;
  RunRecord record;
};

/// One random configuration, or nullopt when the draw is not a valid config.
std::optional<FuzzCase> fuzz_one(Rng& rng, Seed seed) {
  const auto alg = static_cast<AlgorithmId>(uniform_below(rng, 6));
  FuzzCase fc;
  const int passes = uniform_int(rng, 1, 3);
  auto describe = [&](int n, int m, int p, Rounds t) {
    fc.description = to_string(alg) + " n=" + std::to_string(n) + " m=" + std::to_string(m) +
                     " P=" + std::to_string(p) + " T=" + std::to_string(t) +
                     " seed=" + std::to_string(seed);
  };
  try {
    switch (alg) {
      case AlgorithmId::LargeSimple:
      case AlgorithmId::LargeGeneral: {
        const bool simple = alg == AlgorithmId::LargeSimple;
        const int n = simple ? uniform_int(rng, 4, 20) : uniform_int(rng, 9, 26);
        const int m = simple ? n - 1 : uniform_int(rng, (8 * n + 8) / 9, n - 1);
        const Rounds sq = Rounds(n + 1) * (n + 1);
        const Rounds t = sq + static_cast<Rounds>(uniform_below(rng, std::uint64_t(7 * sq)));
        describe(n, m, passes, t);
        const auto config = make_large_config(simple ? LargeVariant::SimpleNm1 : LargeVariant::General,
                                              n, m, passes, t);
        StreamEnv env(fuzz_instance(rng, n, passes), passes, t, m, seed,
                      simple ? RecallMode::DroppedThisPass : RecallMode::Strict);
        fc.record = simple ? run_large_simple(env, config) : run_large_general(env, config);
        break;
      }
      case AlgorithmId::Small: {
        const int n = uniform_int(rng, 3, 20);
        const int max_m = (8 * n - 1) / 9;
        if (max_m < 2) return std::nullopt;
        const int m = uniform_int(rng, 2, max_m);
        const Rounds sq = Rounds(n + 1) * (n + 1);
        const Rounds t = sq + static_cast<Rounds>(uniform_below(rng, std::uint64_t(7 * sq)));
        describe(n, m, passes, t);
        const auto config = make_small_config(n, m, passes, t);
        StreamEnv env(fuzz_instance(rng, n, passes), passes, t, m, seed);
        fc.record = run_small(env, config);
        break;
      }
      case AlgorithmId::Uniform: {
        const int n = uniform_int(rng, 2, 20);
        const Rounds t = uniform_int(rng, 1, 3000);
        describe(n, n, 1, t);
        StreamEnv env(fuzz_instance(rng, n, 1), 1, t, std::max(n, 2), seed);
        fc.record = run_uniform(env);
        break;
      }
      case AlgorithmId::Bai: {
        const int n = uniform_int(rng, 3, 40);
        const int m = uniform_int(rng, 2, 5);
        const int r = std::max(1, std::min(log_star(double(n)), m - 1));
        const Rounds t = uniform_int(rng, 100, 20000);
        describe(n, m, 1, t);
        StreamEnv env(fuzz_instance(rng, n, 1), 1, t, m, seed);
        fc.record = run_bai_stream(env, r, 0.2 + 0.4 * uniform01(rng), 0.25).record;
        break;
      }
      case AlgorithmId::Bar: {
        const int n = uniform_int(rng, 3, 20);
        const int m = uniform_int(rng, 2, n - 1);
        const auto config = make_bar_config(n, m, 0.3 + 0.6 * uniform01(rng), 0.3 + 0.6 * uniform01(rng));
        describe(n, m, 1, config.L1 + config.L2);
        Arena arena = open_arena(fuzz_instance(rng, n, 1), config.L1 + config.L2, seed);
        run_bar(arena.env, config, m);
        fc.record = arena.env.finish();
        break;
      }
    }
  } catch (const ConfigError&) {
    return std::nullopt;
  }
  return fc;
}

}  // namespace

FuzzReport fuzz_referee(int configurations, Seed seed, int jobs) {
  FuzzReport report;
  report.configurations = configurations;
  struct Slot {
    int attempts = 0;
    bool violation = false, audit = false, error = false;
    std::string description;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(configurations));
  parallel_for(slots.size(), jobs, [&](std::size_t i) {
    Slot& out = slots[i];
    Rng rng(derive_seed(seed, i));
    for (;;) {
      ++out.attempts;
      const Seed run = rng();
      try {
        auto fc = fuzz_one(rng, run);
        if (!fc) continue;
        out.description = fc->description;
        out.violation = fc->record.violation;
        out.audit = fc->record.violation_kind == to_string(ViolationKind::Accounting);
      } catch (const RefereeViolation& v) {
        out.violation = true;
        out.description += std::string(" (") + v.what() + ")";
      } catch (const std::exception& e) {
        out.error = true;
        out.description += std::string(" (") + e.what() + ")";
      }
      return;
    }
  });
  for (const Slot& s : slots) {
    report.runs += 1;
    report.violations += s.violation ? 1 : 0;
    report.audit_failures += s.audit ? 1 : 0;
    report.errors += s.error ? 1 : 0;
    if ((s.violation || s.audit || s.error) && report.details.size() < 10) {
      report.details.push_back(s.description);
    }
  }
  return report;
}

ControlReport run_negative_controls(Seed seed) {
  ControlReport rep;
  const auto instance = make_instance({0.2, 0.4, 0.6, 0.8}, identity_orders(4, 1));
  {
    StreamEnv env(instance, 1, 100, 3, seed);
    try {
      for (int i = 0; i < 4; ++i) env.read_next();
    } catch (const RefereeViolation& v) {
      rep.hoarder = v.kind() == ViolationKind::MemoryFull && env.violation();
    }
  }
  {
    StreamEnv env(instance, 1, 10, 4, seed);
    const SlotId slot = env.read_next()->slot;
    try {
      for (int i = 0; i < 20; ++i) {
        try {
          env.pull(slot);
        } catch (const GameOver&) {
          // A well-behaved policy stops here.
        }
      }
    } catch (const RefereeViolation& v) {
      rep.over_pull = v.kind() == ViolationKind::BudgetExceeded && env.violation();
    }
  }
  {
    StreamEnv env(instance, 1, 10, 2, seed);
    const SlotId first = env.read_next()->slot;
    env.drop(first);
    env.read_next();
    try {
      env.pull(first);
    } catch (const RefereeViolation& v) {
      rep.stale = v.kind() == ViolationKind::StaleHandle && env.violation();
    }
  }
  return rep;
}

}  // namespace smab
