#pragma once

// Numeric helpers and parameter schedules for the streaming algorithms.
// All functions are pure and thread-safe.

#include <cstdint>
#include <vector>

namespace smab {

using Rounds = std::int64_t;

/// Iterated natural logarithm clamped at 1: ilog(0, a) = a,
/// ilog(k, a) = max(log(ilog(k-1, a)), 1). Throws DomainError for k < 0 or a < 1.
double ilog(int k, double a);

/// Smallest k >= 0 with ilog(k, x) == 1. log_star(1) == 0.
int log_star(double x);

/// Pass exponent (2^{P-p+1} - 1) / (2^{P+1} - 1), for 1 <= p <= P.
double lambda_p(int passes, int pass);

/// Regret exponent of a P-pass algorithm, 2^P / (2^{P+1} - 1).
double regret_exponent(int passes);

/// Ceiling of a positive quantity. When the double value sits within 1e-9
/// relative distance of an integer, `precise` (an extended precision
/// evaluation of the same quantity) decides the side.
Rounds guarded_ceil(double value, long double precise);

/// Round counts for the two large-memory algorithms.
struct ScheduleLarge {
  Rounds L1 = 0;
  std::vector<Rounds> Lp1;  // Lp1[p - 2] is the first FindBest length of pass p >= 2
  std::vector<Rounds> Lp2;  // Lp2[p - 2] is the second FindBest length of pass p >= 2

  Rounds first_findbest(int pass) const { return Lp1.at(static_cast<std::size_t>(pass - 2)); }
  Rounds second_findbest(int pass) const { return Lp2.at(static_cast<std::size_t>(pass - 2)); }
};

/// Preconditions: 2 <= m < n, P >= 1, T >= (n+1)^2; otherwise ConfigError.
ScheduleLarge schedule_large(int n, int m, int passes, Rounds horizon);

/// The m = n-1 warm-up schedule: L_1 and L_{p,2} as above with n - m = 1,
/// and L_{p,1} = n^3 * L_{p-1,2}. Preconditions: n >= 3, P >= 1, T >= (n+1)^2.
ScheduleLarge schedule_large_simple(int n, int passes, Rounds horizon);

struct ScheduleSmall {
  std::vector<double> eps;   // eps[0..P], eps[0] == 1
  std::vector<Rounds> s;     // s[p - 1] is the admission duel length of pass p
  int r = 0;                 // BAI level count
  double delta = 0.25;

  Rounds duel_rounds(int pass) const { return s.at(static_cast<std::size_t>(pass - 1)); }
};

/// Preconditions: 2 <= m, 9m < 8n, P >= 1, T >= (n+1)^2, delta in (0, 1/4].
ScheduleSmall schedule_small(int n, int m, int passes, Rounds horizon, double delta = 0.25);

struct ScheduleBai {
  std::vector<Rounds> c;  // c[l - 1]: arms needed at level l before promotion
  std::vector<Rounds> s;  // s[l - 1]: samples per challenger at level l

  int levels() const { return static_cast<int>(c.size()); }
};

/// Preconditions: 1 <= r <= log_star(n), eps in (0, 1), delta in (0, 1/4].
ScheduleBai schedule_bai(int n, int r, double eps, double delta);

/// Worst-case pull count of one multi-level BAI run over at most n arms:
/// sum_l s_l * floor(n / prod_{j<l} c_j) + r * s_r.
Rounds bai_sample_bound(int n, const ScheduleBai& schedule);

/// log log T - log(12 log(n/(n-m))): the largest pass count for which the
/// large-memory analysis applies.
double large_memory_pass_limit(int n, int m, double horizon);

}  // namespace smab
