#pragma once

// Online stochastic mirror descent with the Tsallis-1/2 potential
// F(q) = -2 sum sqrt(q), and the FindBest wrapper built on it.

#include <cstddef>
#include <span>
#include <vector>

#include "smab/mathkit.hpp"
#include "smab/stream_env.hpp"

namespace smab {

struct MdState {
  std::vector<double> q;
  std::vector<double> root;  // sqrt(q), kept in step; recomputed if q is edited
  double eta = 0.0;
  std::vector<Rounds> plays;
  Rounds rounds_done = 0;
  Rounds rounds_total = 0;
  bool exhausted = false;  // the env ran out of budget before rounds_total

  std::size_t k() const { return q.size(); }
};

/// Uniform q over k arms, eta = sqrt(8 / L). DomainError for k < 1 or L < 1.
MdState md_init(std::size_t k, Rounds rounds);

/// Reduced-variance loss estimate for one observed loss of arm `chosen`.
std::vector<double> loss_estimator(const MdState& state, std::size_t chosen, double loss);

/// Allocation-free variant of loss_estimator.
void loss_estimator_into(const MdState& state, std::size_t chosen, double loss,
                         std::span<double> out);

/// Mirror step onto the simplex: q'_i = (1/sqrt(q_i) + eta*est_i - nu)^-2.
void md_step(MdState& state, std::span<const double> estimator);

/// Fused loss_estimator + md_step for one observed loss.
void md_observe(MdState& state, std::size_t chosen, double loss);

/// L rounds of OSMD over the given resident slots. Stops early, with
/// `exhausted` set, if the env budget runs out.
MdState run_mirror_descent(StreamEnv& env, std::span<const SlotId> slots, Rounds rounds);

struct FindBestResult {
  std::size_t index = 0;  // position inside the input span
  SlotId slot;
  bool exhausted = false;
};

/// Runs OSMD for L rounds, then samples an index with probability T_i / rounds_done.
FindBestResult find_best(StreamEnv& env, std::span<const SlotId> slots, Rounds rounds);

/// Samples an index with probability plays[i] / sum(plays); uniform if no plays.
std::size_t sample_by_plays(std::span<const Rounds> plays, Rng& rng);

}  // namespace smab
