#include "smab/stream_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace smab {

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::MemoryFull: return "memory-full";
    case ViolationKind::EmptySlot: return "empty-slot";
    case ViolationKind::StaleHandle: return "stale-handle";
    case ViolationKind::BudgetExceeded: return "budget-exceeded";
    case ViolationKind::Accounting: return "accounting";
  }
  return "unknown";
}

StreamEnv::StreamEnv(InstanceSpec instance, int passes, Rounds budget, int memory, Seed seed,
                     RecallMode recall)
    : instance_(std::move(instance)),
      passes_(passes),
      budget_(budget),
      memory_(memory),
      seed_(seed),
      recall_(recall),
      best_mean_(instance_.best_mean()),
      reward_rng_(derive_seed(seed, 0)),
      player_rng_(derive_seed(seed, 1)) {
  if (memory < 2) throw ConfigError("env: memory m must be >= 2 (got m=" + std::to_string(memory) + ")");
  if (passes < 1) throw ConfigError("env: P must be >= 1");
  if (passes > instance_.passes()) {
    throw ConfigError("env: instance has " + std::to_string(instance_.passes()) +
                      " pass orders, P=" + std::to_string(passes) + " requested");
  }
  if (budget < 1) throw ConfigError("env: T must be >= 1");
  const auto n = static_cast<std::size_t>(instance_.n());
  slots_.resize(static_cast<std::size_t>(memory));
  resident_slot_.assign(n, -1);
  drops_this_pass_.assign(n, 0);
  arm_pulls_.assign(n, 0);
  pass_rounds_.assign(static_cast<std::size_t>(passes), 0);
  king_means_.assign(static_cast<std::size_t>(passes), std::numeric_limits<double>::quiet_NaN());
}

void StreamEnv::fail(ViolationKind kind, const std::string& message) {
  if (!violation_) violation_kind_ = std::string(to_string(kind));
  violation_ = true;
  throw RefereeViolation(kind, message);
}

const StreamEnv::Slot& StreamEnv::checked_const(SlotId slot, const char* op) const {
  return const_cast<StreamEnv*>(this)->checked(slot, op);
}

StreamEnv::Slot& StreamEnv::checked(SlotId slot, const char* op) {
  if (slot.index < 0 || slot.index >= memory_) {
    fail(ViolationKind::EmptySlot, std::string(op) + ": slot index out of range");
  }
  Slot& s = slots_[static_cast<std::size_t>(slot.index)];
  if (s.generation != slot.generation) {
    fail(ViolationKind::StaleHandle, std::string(op) + ": handle refers to a dropped arm");
  }
  if (!s.occupied) fail(ViolationKind::EmptySlot, std::string(op) + ": slot is empty");
  return s;
}

bool StreamEnv::is_valid(SlotId slot) const {
  if (slot.index < 0 || slot.index >= memory_) return false;
  const Slot& s = slots_[static_cast<std::size_t>(slot.index)];
  return s.occupied && s.generation == slot.generation;
}

std::vector<SlotId> StreamEnv::resident() const {
  std::vector<SlotId> out;
  for (int i = 0; i < memory_; ++i) {
    const Slot& s = slots_[static_cast<std::size_t>(i)];
    if (s.occupied) out.push_back({i, s.generation});
  }
  return out;
}

SlotStats StreamEnv::stats(SlotId slot) const { return checked_const(slot, "stats").stats; }

void StreamEnv::end_pass() {
  double king = -std::numeric_limits<double>::infinity();
  for (const Slot& s : slots_) {
    if (s.occupied) king = std::max(king, instance_.mean(s.arm));
  }
  king_means_[static_cast<std::size_t>(passes_ended_)] = king;
  ++passes_ended_;
  cursor_ = 0;
  std::fill(drops_this_pass_.begin(), drops_this_pass_.end(), 0);
}

std::optional<Arrival> StreamEnv::read_next() {
  if (stream_exhausted()) return std::nullopt;
  const int pass = passes_ended_ + 1;
  const auto& order = instance_.order(pass);
  const ArmId arm = order[static_cast<std::size_t>(cursor_)];
  const auto a = static_cast<std::size_t>(arm - 1);
  const bool last = cursor_ + 1 == instance_.n();

  Arrival arrival;
  arrival.pass = pass;
  arrival.pass_ended = last;
  if (resident_slot_[a] >= 0) {
    const int idx = resident_slot_[a];
    arrival.kind = ArrivalKind::Resident;
    arrival.slot = {idx, slots_[static_cast<std::size_t>(idx)].generation};
  } else if (recall_ == RecallMode::DroppedThisPass && drops_this_pass_[a] > 0) {
    arrival.kind = ArrivalKind::RecalledDrop;
  } else {
    if (occupied_ >= memory_) {
      fail(ViolationKind::MemoryFull, "read: no free slot for a new arm (m=" +
                                          std::to_string(memory_) + ")");
    }
    int idx = 0;
    while (slots_[static_cast<std::size_t>(idx)].occupied) ++idx;
    Slot& s = slots_[static_cast<std::size_t>(idx)];
    s.occupied = true;
    s.arm = arm;
    ++s.generation;
    s.stats = {};
    resident_slot_[a] = idx;
    ++occupied_;
    arrival.kind = ArrivalKind::Installed;
    arrival.slot = {idx, s.generation};
  }
  ++cursor_;
  if (last) end_pass();
  return arrival;
}

void StreamEnv::drop(SlotId slot) {
  Slot& s = checked(slot, "drop");
  const auto a = static_cast<std::size_t>(s.arm - 1);
  if (++drops_this_pass_[a] >= 2) double_drop_ = true;
  resident_slot_[a] = -1;
  s.occupied = false;
  s.arm = 0;
  s.stats = {};
  ++s.generation;
  --occupied_;
}

void StreamEnv::count_round(ArmId arm, Rounds count) {
  rounds_used_ += count;
  arm_pulls_[static_cast<std::size_t>(arm - 1)] += count;
  if (passes_ended_ < passes_) {
    pass_rounds_[static_cast<std::size_t>(passes_ended_)] += count;
  } else {
    exploitation_rounds_ += count;
  }
}

int StreamEnv::pull(SlotId slot) {
  Slot& s = checked(slot, "pull");
  if (rounds_used_ >= budget_) {
    if (game_over_signalled_) fail(ViolationKind::BudgetExceeded, "pull: budget already exhausted");
    game_over_signalled_ = true;
    throw GameOver();
  }
  const int reward = uniform01(reward_rng_) < instance_.mean(s.arm) ? 1 : 0;
  ++s.stats.pulls;
  s.stats.reward_sum += reward;
  count_round(s.arm, 1);
  return reward;
}

Rounds StreamEnv::pull_repeated(SlotId slot, Rounds count) {
  Slot& s = checked(slot, "pull");
  if (count < 0) throw UsageError("pull_repeated: negative count");
  if (count == 0) return 0;
  if (rounds_used_ >= budget_) {
    if (game_over_signalled_) fail(ViolationKind::BudgetExceeded, "pull: budget already exhausted");
    game_over_signalled_ = true;
    throw GameOver();
  }
  const Rounds granted = std::min(count, budget_ - rounds_used_);
  std::binomial_distribution<Rounds> draw(granted, instance_.mean(s.arm));
  const Rounds successes = draw(reward_rng_);
  s.stats.pulls += granted;
  s.stats.reward_sum += static_cast<double>(successes);
  count_round(s.arm, granted);
  if (granted < count) {
    game_over_signalled_ = true;
    throw GameOver();
  }
  return successes;
}

void StreamEnv::declare_king(int pass, SlotId slot) {
  if (pass < 1 || pass > passes_) throw UsageError("declare_king: pass out of range");
  king_means_[static_cast<std::size_t>(pass - 1)] = instance_.mean(checked(slot, "declare_king").arm);
}

void StreamEnv::declare_output(std::span<const SlotId> slots) {
  double best = -std::numeric_limits<double>::infinity();
  for (SlotId id : slots) best = std::max(best, instance_.mean(checked(id, "declare_output").arm));
  if (!slots.empty()) output_mean_ = best;
}

void StreamEnv::probe(std::string label, SlotId slot) {
  probes_.push_back({std::move(label), current_pass(), instance_.mean(checked(slot, "probe").arm)});
}

void StreamEnv::mark_truncated(std::string stage) {
  if (!truncated_) stage_ = std::move(stage);
  truncated_ = true;
}

bool StreamEnv::audit() {
  bool ok = true;
  int count = 0;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const Slot& s = slots_[i];
    if (!s.occupied) continue;
    ++count;
    if (s.arm < 1 || s.arm > n() || resident_slot_[static_cast<std::size_t>(s.arm - 1)] != int(i)) {
      ok = false;
    }
    if (s.stats.reward_sum < 0.0 || s.stats.reward_sum > double(s.stats.pulls)) ok = false;
  }
  if (count != occupied_ || occupied_ > memory_) ok = false;
  Rounds by_arm = 0;
  for (Rounds r : arm_pulls_) by_arm += r;
  Rounds by_pass = exploitation_rounds_;
  for (Rounds r : pass_rounds_) by_pass += r;
  if (by_arm != rounds_used_ || by_pass != rounds_used_ || rounds_used_ > budget_) ok = false;
  if (!ok) {
    if (!violation_) violation_kind_ = std::string(to_string(ViolationKind::Accounting));
    violation_ = true;
  }
  return ok;
}

RunRecord StreamEnv::seal() {
  if (sealed_) throw UsageError("seal: run already sealed");
  audit();
  sealed_ = true;
  RunRecord rec;
  double regret = 0.0;
  for (std::size_t i = 0; i < arm_pulls_.size(); ++i) {
    regret += static_cast<double>(arm_pulls_[i]) * (best_mean_ - instance_.means()[i]);
  }
  rec.pseudo_regret = regret;
  rec.pass_rounds = pass_rounds_;
  rec.exploitation_rounds = exploitation_rounds_;
  rec.rounds_used = rounds_used_;
  rec.budget = budget_;
  for (const Slot& s : slots_) {
    if (s.occupied) rec.final_memory_means.push_back(instance_.mean(s.arm));
  }
  rec.best_mean = best_mean_;
  rec.king_means = king_means_;
  rec.output_mean = output_mean_;
  rec.probes = std::move(probes_);
  rec.violation = violation_;
  rec.violation_kind = violation_kind_;
  rec.double_drop = double_drop_;
  rec.truncated = truncated_;
  rec.stage = stage_;
  rec.seed = seed_;
  return rec;
}

RunRecord StreamEnv::finish() {
  if (rounds_used_ != budget_) {
    throw UsageError("finish: " + std::to_string(rounds_used_) + " of " + std::to_string(budget_) +
                     " rounds used");
  }
  return seal();
}

Arena open_arena(InstanceSpec instance, Rounds budget, Seed seed) {
  const int n = instance.n();
  if (n < 2) throw ConfigError("arena: need at least two arms");
  Arena arena{StreamEnv(std::move(instance), 1, budget, n, seed), {}};
  while (auto arrival = arena.env.read_next()) arena.slots.push_back(arrival->slot);
  return arena;
}

}  // namespace smab
