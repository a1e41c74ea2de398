#pragma once

// The referee for the P-pass streaming bandit model.
//
// Algorithms see only slot handles and the per-slot statistics they
// accumulated; arm means stay hidden until the run is sealed. One pull per
// round, any number of reads and drops between pulls. A pass ends when its
// last arm is read; later pulls count toward the next pass, or toward
// exploitation after pass P.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smab/errors.hpp"
#include "smab/instances.hpp"
#include "smab/mathkit.hpp"
#include "smab/rng.hpp"

namespace smab {

/// Opaque handle to an occupied memory slot. Invalid once the arm is dropped.
struct SlotId {
  int index = -1;
  std::uint32_t generation = 0;

  friend bool operator==(const SlotId&, const SlotId&) = default;
};

/// Player-visible statistics of a resident arm.
struct SlotStats {
  Rounds pulls = 0;
  double reward_sum = 0.0;

  double empirical_mean() const { return pulls == 0 ? 0.0 : reward_sum / double(pulls); }
};

enum class ArrivalKind {
  Installed,     // new arm placed in a free slot with zeroed statistics
  Resident,      // arm already in memory; its existing slot is returned
  RecalledDrop,  // relaxed mode only: arm dropped earlier this pass, not installed
};

struct Arrival {
  SlotId slot;
  ArrivalKind kind = ArrivalKind::Installed;
  int pass = 1;             // pass the arrival belongs to
  bool pass_ended = false;  // this was the last arm of its pass

  bool already_in_memory() const { return kind == ArrivalKind::Resident; }
};

/// Strict: dropped arms are forgotten entirely. DroppedThisPass grants the
/// remembered-identity relaxation used by the m = n-1 warm-up algorithm.
enum class RecallMode { Strict, DroppedThisPass };

struct Probe {
  std::string label;
  int pass = 0;
  double mean = 0.0;
};

struct RunRecord {
  double pseudo_regret = 0.0;
  std::vector<Rounds> pass_rounds;  // L_1..L_P
  Rounds exploitation_rounds = 0;
  Rounds rounds_used = 0;
  Rounds budget = 0;
  std::vector<double> final_memory_means;
  double best_mean = 0.0;
  std::vector<double> king_means;      // per pass; NaN when the pass never ended
  std::optional<double> output_mean;   // best mean among a declared output set
  std::vector<Probe> probes;
  bool violation = false;
  std::string violation_kind;
  bool double_drop = false;  // some arm was dropped twice within one pass
  bool truncated = false;    // budget ran out before the algorithm finished
  std::string stage;         // where a truncated run stopped
  Seed seed = 0;

  double king_gap(int pass) const {
    return best_mean - king_means.at(static_cast<std::size_t>(pass - 1));
  }
};

class StreamEnv {
 public:
  /// m >= 2, P >= 1 (and at most the instance's pass count), T >= 1; ConfigError otherwise.
  StreamEnv(InstanceSpec instance, int passes, Rounds budget, int memory, Seed seed,
            RecallMode recall = RecallMode::Strict);

  StreamEnv(StreamEnv&&) noexcept = default;
  StreamEnv& operator=(StreamEnv&&) noexcept = default;
  StreamEnv(const StreamEnv&) = delete;
  StreamEnv& operator=(const StreamEnv&) = delete;

  int n() const { return instance_.n(); }
  int memory() const { return memory_; }
  int passes() const { return passes_; }
  Rounds budget() const { return budget_; }
  Rounds rounds_used() const { return rounds_used_; }
  Rounds rounds_left() const { return budget_ - rounds_used_; }
  int passes_ended() const { return passes_ended_; }
  /// Pass whose exploration is in progress; P+1 during exploitation.
  int current_pass() const { return passes_ended_ + 1; }
  bool stream_exhausted() const { return passes_ended_ >= passes_; }
  int occupied() const { return occupied_; }
  int free_slots() const { return memory_ - occupied_; }
  bool violation() const { return violation_; }

  /// Resident slots in slot-index order.
  std::vector<SlotId> resident() const;
  bool is_valid(SlotId slot) const;
  SlotStats stats(SlotId slot) const;

  /// Next arm of the stream, or nullopt once every pass is exhausted.
  /// A non-resident arm needs a free slot: otherwise MemoryFull.
  std::optional<Arrival> read_next();
  /// Frees the slot and forgets the arm and its statistics.
  void drop(SlotId slot);
  /// One round: Bernoulli reward of the slot's arm.
  int pull(SlotId slot);
  /// `count` consecutive rounds on one slot; returns the number of successes.
  /// Pulls what the budget allows, then throws GameOver if it ran short.
  Rounds pull_repeated(SlotId slot, Rounds count);

  /// Randomness reserved for the algorithm's own choices.
  Rng& player_rng() { return player_rng_; }

  /// Analysis hooks: record hidden means into the sealed record only.
  void declare_king(int pass, SlotId slot);
  void declare_output(std::span<const SlotId> slots);
  void probe(std::string label, SlotId slot);
  void mark_truncated(std::string stage);

  /// Checks bookkeeping invariants; returns false (and flags) on failure.
  bool audit();

  /// Seals the run. Requires rounds_used == T.
  RunRecord finish();
  /// Seals the run in whatever state it is in (analysis runs, truncations).
  RunRecord seal();

 private:
  struct Slot {
    bool occupied = false;
    ArmId arm = 0;
    std::uint32_t generation = 0;
    SlotStats stats;
  };

  Slot& checked(SlotId slot, const char* op);
  const Slot& checked_const(SlotId slot, const char* op) const;
  [[noreturn]] void fail(ViolationKind kind, const std::string& message);
  void end_pass();
  void count_round(ArmId arm, Rounds count);

  InstanceSpec instance_;
  int passes_;
  Rounds budget_;
  int memory_;
  Seed seed_;
  RecallMode recall_;
  double best_mean_;

  std::vector<Slot> slots_;
  std::vector<int> resident_slot_;   // per arm id - 1: slot index or -1
  std::vector<int> drops_this_pass_; // per arm id - 1
  std::vector<Rounds> arm_pulls_;    // per arm id - 1, hidden
  int occupied_ = 0;
  int passes_ended_ = 0;
  int cursor_ = 0;  // position inside the current pass order
  Rounds rounds_used_ = 0;
  std::vector<Rounds> pass_rounds_;
  Rounds exploitation_rounds_ = 0;
  std::vector<double> king_means_;
  std::optional<double> output_mean_;
  std::vector<Probe> probes_;
  bool violation_ = false;
  std::string violation_kind_;
  bool game_over_signalled_ = false;
  bool double_drop_ = false;
  bool truncated_ = false;
  std::string stage_;
  bool sealed_ = false;

  Rng reward_rng_;
  Rng player_rng_;
};

/// All n arms resident, no further stream: the offline setting used by BAR.
struct Arena {
  StreamEnv env;
  std::vector<SlotId> slots;
};
Arena open_arena(InstanceSpec instance, Rounds budget, Seed seed);

}  // namespace smab
