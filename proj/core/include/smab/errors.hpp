#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smab {

/// Invalid parameters or inconsistent configuration (CLI exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a helper.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse that is not a memory-model violation (e.g. finishing early).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class ViolationKind : std::uint8_t {
  MemoryFull,      // read with no free slot
  EmptySlot,       // pull/drop on an unoccupied slot
  StaleHandle,     // handle refers to an arm that was dropped
  BudgetExceeded,  // pull after the round budget was signalled exhausted
  Accounting,      // internal bookkeeping invariant broken
};

std::string_view to_string(ViolationKind kind) noexcept;

/// Raised by the referee when an algorithm breaks the memory model.
/// The environment's violation flag is set before this is thrown.
class RefereeViolation : public std::runtime_error {
 public:
  RefereeViolation(ViolationKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ViolationKind kind() const noexcept { return kind_; }

 private:
  ViolationKind kind_;
};

/// The round budget T is used up. Not a violation: algorithms unwind on it.
class GameOver : public std::runtime_error {
 public:
  GameOver() : std::runtime_error("round budget exhausted") {}
};

}  // namespace smab
