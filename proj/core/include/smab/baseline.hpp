#pragma once

#include "smab/stream_env.hpp"

namespace smab {

/// Reference policy: reads every arm (needs m >= n) and pulls uniformly at
/// random until T. Its expected pseudo-regret is T * mean gap.
RunRecord run_uniform(StreamEnv& env);

}  // namespace smab
