#pragma once

// Offline best-arm retention: all n arms resident, keep m of them.

#include <vector>

#include "smab/mathkit.hpp"
#include "smab/stream_env.hpp"

namespace smab {

struct BarConfig {
  double eps0 = 0.0;
  double eps1 = 0.0;
  Rounds L1 = 0;  // ceil(2n / eps0^2)
  Rounds L2 = 0;  // ceil(2(n - m + 2) / eps1^2)
};

/// Either ordering of eps0, eps1 is accepted; both must lie in (0, 1).
BarConfig make_bar_config(int n, int m, double eps0, double eps1);

struct BarResult {
  std::vector<SlotId> kept;  // m slots, in slot order
  SlotId first;              // a'_1
  SlotId second;             // a'_2
};

/// Runs on an arena env holding all n arms. ConfigError unless 2 <= m < n.
/// Declares the kept set as the run output.
BarResult run_bar(StreamEnv& arena, const BarConfig& config, int m);

}  // namespace smab
