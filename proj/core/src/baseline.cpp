#include "smab/baseline.hpp"

#include "smab/errors.hpp"

namespace smab {

RunRecord run_uniform(StreamEnv& env) {
  if (env.memory() < env.n()) throw ConfigError("uniform: needs m >= n to hold every arm");
  while (env.current_pass() == 1) env.read_next();
  const auto arms = env.resident();
  Rng& rng = env.player_rng();
  while (env.rounds_left() > 0) env.pull(arms[uniform_below(rng, arms.size())]);
  return env.finish();
}

}  // namespace smab
