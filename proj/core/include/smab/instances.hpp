#pragma once

// Bernoulli bandit instances and the lower-bound hard families.

#include <string>
#include <vector>

#include "smab/rng.hpp"

namespace smab {

/// 1-based arm identity, as used in arrival orders and serialized specs.
using ArmId = int;

/// Ground truth of one game: arm means plus one arrival order per pass.
/// Immutable once built; validated by make_instance.
class InstanceSpec {
 public:
  InstanceSpec() = default;

  int n() const { return static_cast<int>(means_.size()); }
  int passes() const { return static_cast<int>(orders_.size()); }
  double mean(ArmId id) const { return means_[static_cast<std::size_t>(id - 1)]; }
  const std::vector<double>& means() const { return means_; }
  /// Order of pass `pass` (1-based), a permutation of 1..n.
  const std::vector<ArmId>& order(int pass) const {
    return orders_.at(static_cast<std::size_t>(pass - 1));
  }
  const std::vector<std::vector<ArmId>>& orders() const { return orders_; }
  double best_mean() const;

  std::string to_json() const;
  static InstanceSpec from_json(const std::string& text);

  friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;

 private:
  friend InstanceSpec make_instance(std::vector<double>, std::vector<std::vector<ArmId>>);
  std::vector<double> means_;
  std::vector<std::vector<ArmId>> orders_;
};

/// Validates means in [0,1] and every order a permutation of 1..n; ConfigError otherwise.
InstanceSpec make_instance(std::vector<double> means, std::vector<std::vector<ArmId>> orders);

/// `passes` copies of the identity order 1..n.
std::vector<std::vector<ArmId>> identity_orders(int n, int passes);

/// `passes` independent uniformly random orders.
std::vector<std::vector<ArmId>> random_orders(int n, int passes, Seed seed);

enum class HardKind { H0, Hjp };

struct HardFamily {
  HardKind kind = HardKind::H0;
  int j = 1;                 // optimal arm for Hjp
  int p = 0;                 // level: mean[j] = 1/2 + eps[p]
  std::vector<double> eps;   // eps[0..P]; eps[0] must be 1/2, eps[p >= 1] in (0, 1/4]
};

/// H0: n fair coins in identity order every pass. Hjp: arm j at 1/2 + eps[p];
/// identity order for passes 1..p, arm j last in pass p+1, random later passes.
InstanceSpec hard_instance(const HardFamily& family, int n, int passes, Seed seed);

enum class RegimeCheck { Enforce, Ignore };

/// Gap parameters eps_1..eps_P of the lower-bound construction with
/// t_p = P - p + 6. The horizon is real-valued because the admissible regime
/// P <= log log T - log(14 log 8(n-m)) needs T far beyond 64-bit integers.
std::vector<double> lower_bound_eps(int n, int m, int passes, double horizon, double c1 = 1.0,
                                    RegimeCheck regime = RegimeCheck::Enforce);

/// One arm (`best`, 1-based) at base + gap, all others at base.
std::vector<double> single_gap_means(int n, ArmId best, double base, double gap);

}  // namespace smab
