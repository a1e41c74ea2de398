#include "smab/mathkit.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "smab/errors.hpp"

namespace smab {
namespace {

template <typename F>
F ilog_t(int k, F a) {
  F v = a;
  for (int i = 0; i < k; ++i) v = std::max<F>(std::log(v), F(1));
  return v;
}

template <typename F>
F lambda_t(int passes, int pass) {
  const F num = std::ldexp(F(1), passes - pass + 1) - F(1);
  const F den = std::ldexp(F(1), passes + 1) - F(1);
  return num / den;
}

// 2^{a} (n-m)^{3 lam} n^{-2 lam} T^{1 - lam}
template <typename F>
F large_term(int two_pow, int n, int m, F lam, Rounds horizon) {
  return std::ldexp(F(1), two_pow) * std::pow(F(n - m), F(3) * lam) *
         std::pow(F(n), F(-2) * lam) * std::pow(F(horizon), F(1) - lam);
}

template <typename F>
F small_eps(int n, int m, int passes, int pass, Rounds horizon) {
  const F lam = lambda_t<F>(passes, pass);
  const F base = F(n + 1) * ilog_t<F>(m - 1, F(n + 1)) / F(horizon);
  return std::ldexp(F(1), passes - pass + 1) * std::pow(base, (F(1) - lam) / F(2));
}

template <typename F>
F small_s(F eps, int n, int r, double delta) {
  return F(32) / (eps * eps) * std::log(F(8) * ilog_t<F>(r - 1, F(n + 1)) / F(delta));
}

template <typename F>
F bai_s(int level, Rounds c, double eps, double delta) {
  return std::ldexp(F(1), 2 * level + 3) / (F(eps) * F(eps)) *
         std::log(std::ldexp(F(1), level + 2) * F(c) / F(delta));
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

double ilog(int k, double a) {
  if (k < 0) throw DomainError("ilog: order k must be >= 0, got " + std::to_string(k));
  if (!(a >= 1.0)) throw DomainError("ilog: argument must be >= 1, got " + std::to_string(a));
  return ilog_t<double>(k, a);
}

int log_star(double x) {
  if (!(x >= 1.0)) throw DomainError("log_star: argument must be >= 1, got " + std::to_string(x));
  int k = 0;
  double v = x;
  while (v != 1.0) {
    v = std::max(std::log(v), 1.0);
    ++k;
  }
  return k;
}

double lambda_p(int passes, int pass) {
  if (passes < 1 || pass < 1 || pass > passes) {
    throw DomainError("lambda_p: need 1 <= p <= P, got p=" + std::to_string(pass) +
                      " P=" + std::to_string(passes));
  }
  return lambda_t<double>(passes, pass);
}

double regret_exponent(int passes) {
  if (passes < 1) throw DomainError("regret_exponent: P must be >= 1");
  return std::ldexp(1.0, passes) / (std::ldexp(1.0, passes + 1) - 1.0);
}

Rounds guarded_ceil(double value, long double precise) {
  if (!std::isfinite(value) || value > 9.0e18) {
    throw NumericError("schedule value is not representable: " + std::to_string(value));
  }
  const double nearest = std::nearbyint(value);
  const bool near_boundary =
      nearest != 0.0 && std::fabs(value - nearest) <= 1e-9 * std::fabs(nearest);
  const long double chosen = near_boundary ? precise : static_cast<long double>(value);
  const auto result = static_cast<Rounds>(std::ceil(chosen));
  return result < 1 ? Rounds{1} : result;
}

ScheduleLarge schedule_large(int n, int m, int passes, Rounds horizon) {
  require(m >= 2, "schedule_large: memory m must be >= 2 (got m=" + std::to_string(m) + ")");
  require(m < n, "schedule_large: need m < n (got m=" + std::to_string(m) +
                     ", n=" + std::to_string(n) + ")");
  require(passes >= 1, "schedule_large: P must be >= 1");
  const Rounds sq = static_cast<Rounds>(n + 1) * static_cast<Rounds>(n + 1);
  require(horizon >= sq, "schedule_large: need T >= (n+1)^2 = " + std::to_string(sq));

  ScheduleLarge out;
  {
    const double lam = lambda_t<double>(passes, 1);
    const long double laml = lambda_t<long double>(passes, 1);
    out.L1 = guarded_ceil(large_term<double>(-2 * passes, n, m, lam, horizon),
                          large_term<long double>(-2 * passes, n, m, laml, horizon));
  }
  const long double cube_ratio =
      std::pow(static_cast<long double>(m), 3.0L) / std::pow(static_cast<long double>(n - m), 3.0L);
  const double cube_ratio_d = std::pow(double(m), 3.0) / std::pow(double(n - m), 3.0);
  Rounds previous_second = out.L1;
  for (int p = 2; p <= passes; ++p) {
    const double lam = lambda_t<double>(passes, p);
    const long double laml = lambda_t<long double>(passes, p);
    const int two_pow = -2 * passes + 2 * p - 2;
    const Rounds lp1 = guarded_ceil(cube_ratio_d * static_cast<double>(previous_second),
                                    cube_ratio * static_cast<long double>(previous_second));
    const Rounds lp2 = guarded_ceil(large_term<double>(two_pow, n, m, lam, horizon),
                                    large_term<long double>(two_pow, n, m, laml, horizon));
    out.Lp1.push_back(lp1);
    out.Lp2.push_back(lp2);
    previous_second = lp2;
  }
  return out;
}

ScheduleLarge schedule_large_simple(int n, int passes, Rounds horizon) {
  require(n >= 3, "schedule_large_simple: need n >= 3");
  ScheduleLarge out = schedule_large(n, n - 1, passes, horizon);
  const double cube = std::pow(double(n), 3.0);
  Rounds previous_second = out.L1;
  for (std::size_t i = 0; i < out.Lp1.size(); ++i) {
    out.Lp1[i] = guarded_ceil(cube * static_cast<double>(previous_second),
                              static_cast<long double>(cube) * previous_second);
    previous_second = out.Lp2[i];
  }
  return out;
}

ScheduleSmall schedule_small(int n, int m, int passes, Rounds horizon, double delta) {
  require(m >= 2, "schedule_small: memory m must be >= 2 (got m=" + std::to_string(m) + ")");
  require(9 * static_cast<long long>(m) < 8 * static_cast<long long>(n),
          "schedule_small: need m < 8n/9 (got m=" + std::to_string(m) +
              ", n=" + std::to_string(n) + ")");
  require(passes >= 1, "schedule_small: P must be >= 1");
  const Rounds sq = static_cast<Rounds>(n + 1) * static_cast<Rounds>(n + 1);
  require(horizon >= sq, "schedule_small: need T >= (n+1)^2 = " + std::to_string(sq));
  require(delta > 0.0 && delta <= 0.25, "schedule_small: delta must lie in (0, 1/4]");

  ScheduleSmall out;
  out.delta = delta;
  out.r = std::min(log_star(static_cast<double>(n + 1)), m - 1);
  out.eps.push_back(1.0);
  for (int p = 1; p <= passes; ++p) {
    const double eps = small_eps<double>(n, m, passes, p, horizon);
    const long double epsl = small_eps<long double>(n, m, passes, p, horizon);
    out.eps.push_back(eps);
    out.s.push_back(guarded_ceil(small_s<double>(eps, n, out.r, delta),
                                 small_s<long double>(epsl, n, out.r, delta)));
  }
  return out;
}

ScheduleBai schedule_bai(int n, int r, double eps, double delta) {
  require(n >= 1, "schedule_bai: n must be >= 1");
  const int max_levels = log_star(static_cast<double>(n));
  require(r >= 1 && r <= max_levels, "schedule_bai: need 1 <= r <= log*(n) = " +
                                         std::to_string(max_levels) + " (got r=" +
                                         std::to_string(r) + ")");
  require(eps > 0.0 && eps < 1.0, "schedule_bai: eps must lie in (0, 1)");
  require(delta > 0.0 && delta <= 0.25, "schedule_bai: delta must lie in (0, 1/4]");

  ScheduleBai out;
  for (int level = 1; level <= r; ++level) {
    const double c = ilog_t<double>(r - level, double(n));
    const long double cl = ilog_t<long double>(r - level, static_cast<long double>(n));
    const Rounds c_int = guarded_ceil(c, cl);
    out.c.push_back(c_int);
    out.s.push_back(guarded_ceil(bai_s<double>(level, c_int, eps, delta),
                                 bai_s<long double>(level, c_int, eps, delta)));
  }
  return out;
}

Rounds bai_sample_bound(int n, const ScheduleBai& schedule) {
  Rounds total = 0;
  Rounds product = 1;
  const int r = schedule.levels();
  for (int level = 1; level <= r; ++level) {
    const auto idx = static_cast<std::size_t>(level - 1);
    total += schedule.s[idx] * (static_cast<Rounds>(n) / product);
    product *= schedule.c[idx];
  }
  if (r > 0) total += static_cast<Rounds>(r) * schedule.s.back();
  return total;
}

double large_memory_pass_limit(int n, int m, double horizon) {
  return std::log(std::log(horizon)) -
         std::log(12.0 * std::log(static_cast<double>(n) / static_cast<double>(n - m)));
}

}  // namespace smab
