#include "smab/bar.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "smab/errors.hpp"
#include "smab/osmd.hpp"

namespace smab {

BarConfig make_bar_config(int n, int m, double eps0, double eps1) {
  if (m < 2 || m >= n) {
    throw ConfigError("bar: need 2 <= m < n (got n=" + std::to_string(n) + ", m=" +
                      std::to_string(m) + ")");
  }
  if (!(eps0 > 0.0 && eps0 < 1.0) || !(eps1 > 0.0 && eps1 < 1.0)) {
    throw ConfigError("bar: eps0 and eps1 must lie in (0, 1)");
  }
  BarConfig c;
  c.eps0 = eps0;
  c.eps1 = eps1;
  const double l1 = 2.0 * n / (eps0 * eps0);
  const double l2 = 2.0 * (n - m + 2) / (eps1 * eps1);
  c.L1 = guarded_ceil(l1, 2.0L * n / (static_cast<long double>(eps0) * eps0));
  c.L2 = guarded_ceil(l2, 2.0L * (n - m + 2) / (static_cast<long double>(eps1) * eps1));
  return c;
}

BarResult run_bar(StreamEnv& arena, const BarConfig& config, int m) {
  const int n = arena.n();
  if (m < 2 || m >= n) throw ConfigError("bar: need 2 <= m < n");
  auto all = arena.resident();
  if (static_cast<int>(all.size()) != n) throw UsageError("bar: arena must hold all n arms");
  Rng& rng = arena.player_rng();

  BarResult out;
  out.first = find_best(arena, all, config.L1).slot;

  std::vector<SlotId> rest;
  for (SlotId s : all) {
    if (!(s == out.first)) rest.push_back(s);
  }
  shuffle(std::span<SlotId>(rest), rng);
  rest.resize(static_cast<std::size_t>(n - m + 1));
  std::vector<SlotId> s_prime = rest;
  s_prime.push_back(out.first);
  out.second = find_best(arena, s_prime, config.L2).slot;

  std::vector<SlotId> droppable;
  for (SlotId s : s_prime) {
    if (!(s == out.first) && !(s == out.second)) droppable.push_back(s);
  }
  shuffle(std::span<SlotId>(droppable), rng);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n - m); ++i) arena.drop(droppable[i]);

  out.kept = arena.resident();
  arena.declare_output(out.kept);
  return out;
}

}  // namespace smab
