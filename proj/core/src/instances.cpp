#include "smab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "json.hpp"
#include "smab/errors.hpp"
#include "smab/mathkit.hpp"

namespace smab {

double InstanceSpec::best_mean() const {
  return means_.empty() ? 0.0 : *std::max_element(means_.begin(), means_.end());
}

std::string InstanceSpec::to_json() const {
  nlohmann::ordered_json doc;
  doc["n"] = n();
  doc["means"] = means_;
  doc["orders"] = orders_;
  return doc.dump();
}

InstanceSpec InstanceSpec::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("instance JSON: ") + e.what());
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "n" && key != "means" && key != "orders") {
      throw ConfigError("instance JSON: unknown key '" + key + "'");
    }
  }
  try {
    auto means = doc.at("means").get<std::vector<double>>();
    auto orders = doc.at("orders").get<std::vector<std::vector<ArmId>>>();
    const int n = doc.at("n").get<int>();
    if (n != static_cast<int>(means.size())) {
      throw ConfigError("instance JSON: n does not match the number of means");
    }
    return make_instance(std::move(means), std::move(orders));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("instance JSON: ") + e.what());
  }
}

InstanceSpec make_instance(std::vector<double> means, std::vector<std::vector<ArmId>> orders) {
  const int n = static_cast<int>(means.size());
  if (n < 1) throw ConfigError("instance: need at least one arm");
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (!(means[i] >= 0.0 && means[i] <= 1.0)) {
      throw ConfigError("instance: mean of arm " + std::to_string(i + 1) + " outside [0,1]");
    }
  }
  if (orders.empty()) throw ConfigError("instance: need at least one pass order");
  for (std::size_t p = 0; p < orders.size(); ++p) {
    const auto& order = orders[p];
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    bool ok = static_cast<int>(order.size()) == n;
    for (ArmId id : order) {
      if (!ok) break;
      if (id < 1 || id > n || seen[static_cast<std::size_t>(id - 1)]) {
        ok = false;
        break;
      }
      seen[static_cast<std::size_t>(id - 1)] = 1;
    }
    if (!ok) {
      throw ConfigError("instance: order of pass " + std::to_string(p + 1) +
                        " is not a permutation of 1.." + std::to_string(n));
    }
  }
  InstanceSpec spec;
  spec.means_ = std::move(means);
  spec.orders_ = std::move(orders);
  return spec;
}

std::vector<std::vector<ArmId>> identity_orders(int n, int passes) {
  std::vector<ArmId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  return std::vector<std::vector<ArmId>>(static_cast<std::size_t>(passes), order);
}

std::vector<std::vector<ArmId>> random_orders(int n, int passes, Seed seed) {
  Rng rng(seed);
  auto orders = identity_orders(n, passes);
  for (auto& order : orders) shuffle(std::span<ArmId>(order), rng);
  return orders;
}

InstanceSpec hard_instance(const HardFamily& family, int n, int passes, Seed seed) {
  if (n < 1 || passes < 1) throw DomainError("hard_instance: need n >= 1 and P >= 1");
  if (family.kind == HardKind::H0) {
    return make_instance(std::vector<double>(static_cast<std::size_t>(n), 0.5),
                         identity_orders(n, passes));
  }
  if (family.j < 1 || family.j > n) {
    throw DomainError("hard_instance: j=" + std::to_string(family.j) + " outside [1, n]");
  }
  if (family.p < 0 || family.p > passes) {
    throw DomainError("hard_instance: p=" + std::to_string(family.p) + " outside [0, P]");
  }
  if (static_cast<int>(family.eps.size()) <= family.p) {
    throw DomainError("hard_instance: eps list is shorter than p + 1");
  }
  if (family.eps[0] != 0.5) throw DomainError("hard_instance: eps_0 must equal 1/2");
  for (std::size_t q = 1; q < family.eps.size(); ++q) {
    if (!(family.eps[q] > 0.0 && family.eps[q] <= 0.25)) {
      throw DomainError("hard_instance: eps_" + std::to_string(q) + " outside (0, 1/4]");
    }
  }

  auto means = single_gap_means(n, family.j, 0.5, family.eps[static_cast<std::size_t>(family.p)]);
  auto orders = identity_orders(n, passes);
  if (family.p < passes) {
    auto& next = orders[static_cast<std::size_t>(family.p)];
    std::rotate(next.begin() + (family.j - 1), next.begin() + family.j, next.end());
  }
  Rng rng(seed);
  for (int pass = family.p + 2; pass <= passes; ++pass) {
    shuffle(std::span<ArmId>(orders[static_cast<std::size_t>(pass - 1)]), rng);
  }
  return make_instance(std::move(means), std::move(orders));
}

std::vector<double> lower_bound_eps(int n, int m, int passes, double horizon, double c1,
                                    RegimeCheck regime) {
  if (!(n > m && m >= 2)) {
    throw ConfigError("lower_bound_eps: need n > m >= 2 (got n=" + std::to_string(n) +
                      ", m=" + std::to_string(m) + ")");
  }
  if (passes < 1) throw ConfigError("lower_bound_eps: need P >= 1");
  if (!(c1 >= 1.0)) throw ConfigError("lower_bound_eps: c1 must be >= 1");
  if (regime == RegimeCheck::Enforce) {
    if (horizon < static_cast<double>(n) * n) {
      throw ConfigError("lower_bound_eps: regime requires T >= n^2");
    }
    const double limit =
        std::log(std::log(horizon)) - std::log(14.0 * std::log(8.0 * (n - m)));
    if (!(passes <= limit)) {
      throw ConfigError("lower_bound_eps: regime requires P <= log log T - log(14 log 8(n-m)) = " +
                        std::to_string(limit) + " (got P=" + std::to_string(passes) + ")");
    }
  }
  std::vector<double> out;
  const double log_term = std::log(64.0 * n * passes);
  for (int p = 1; p <= passes; ++p) {
    const double lam = lambda_p(passes, p);
    const double tp = passes - p + 6;
    const double two_exp = -tp + 5.0 - 5.0 / std::ldexp(1.0, p);
    out.push_back(std::exp2(two_exp) * std::pow(c1, 1.0 / std::ldexp(1.0, p)) *
                  std::pow(horizon, (lam - 1.0) / 2.0) *
                  std::pow(double(n - m), 0.5 - 1.5 * lam) * std::pow(double(n), lam) *
                  std::pow(log_term, (lam - 1.0) / 2.0));
  }
  return out;
}

std::vector<double> single_gap_means(int n, ArmId best, double base, double gap) {
  std::vector<double> means(static_cast<std::size_t>(n), base);
  means.at(static_cast<std::size_t>(best - 1)) = base + gap;
  return means;
}

}  // namespace smab
