#include <benchmark/benchmark.h>

#include <vector>

#include "smab/osmd.hpp"

namespace {

void BM_MdStep(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  smab::MdState st = smab::md_init(k, 1 << 20);
  smab::Rng rng(7);
  std::vector<double> est(k);
  for (auto _ : state) {
    const std::size_t a = smab::uniform_below(rng, k);
    smab::loss_estimator_into(st, a, smab::uniform01(rng) < 0.5 ? 1.0 : 0.0, est);
    smab::md_step(st, est);
    benchmark::DoNotOptimize(st.q.data());
  }
}
BENCHMARK(BM_MdStep)->Arg(2)->Arg(8)->Arg(16)->Arg(64);

void BM_FindBest(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::vector<double> means(static_cast<std::size_t>(k), 0.5);
  means[0] = 0.6;
  const auto instance = smab::make_instance(means, smab::identity_orders(k, 1));
  const smab::Rounds rounds = 10000;
  for (auto _ : state) {
    auto arena = smab::open_arena(instance, rounds, 11);
    benchmark::DoNotOptimize(smab::find_best(arena.env, arena.slots, rounds).index);
  }
  state.SetItemsProcessed(state.iterations() * rounds);
}
BENCHMARK(BM_FindBest)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
