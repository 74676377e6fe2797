#pragma once

// Closed-form first-hitting probabilities P(x, t): the non-halting (classic)
// ruin formula, the finite positive sum over the number of halts, and the
// equivalent terminating-hypergeometric form.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ruin/core.hpp"
#include "ruin/hypergeom.hpp"

namespace ruin {

struct PmfQuery {
  StartPosition x = 0;
  TimeIndex t = 0;
  HopProbabilities params;
};

namespace detail {

inline void require_non_negative(StartPosition x, TimeIndex t) {
  if (x < 0) throw Error(ErrorCode::DomainError, "start position must be >= 0");
  if (t < 0) throw Error(ErrorCode::DomainError, "time index must be >= 0");
}

inline double log_or_neg_inf(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

// (x/t) binom(t, (t+x)/2) pr^{(t-x)/2} pl^{(t+x)/2} for same-parity t >= x >= 1.
inline PmfValue classic_pmf(StartPosition x, TimeIndex t, double pr, double pl) {
  detail::require_non_negative(x, t);
  if (pr < 0.0 || pl < 0.0 || std::abs(pr + pl - 1.0) > kSimplexTolerance) {
    throw Error(ErrorCode::ParameterError, "classic_pmf requires pr + pl = 1");
  }
  constexpr Method m = Method::closed_form;
  if (x == 0) return t == 0 ? PmfValue::one(m) : PmfValue::zero(m);
  if (t < x || (t - x) % 2 != 0) return PmfValue::zero(m);

  const std::int64_t rights = (t - x) / 2;
  const std::int64_t lefts = (t + x) / 2;
  const double log_value = std::log(static_cast<double>(x)) - std::log(static_cast<double>(t)) +
                           log_factorial(t) - log_factorial(lefts) - log_factorial(rights) +
                           log_pow(detail::log_or_neg_inf(pr), rights) +
                           log_pow(detail::log_or_neg_inf(pl), lefts);
  if (!std::isfinite(log_value)) return PmfValue::zero(m);
  return PmfValue::from_log(log_value, m);
}

namespace detail {

template <typename LogFact>
PmfValue pmf_sum(StartPosition x, TimeIndex t, const HopProbabilities& p, const LogFact& lf) {
  constexpr Method m = Method::closed_form;
  if (x == 0) return t == 0 ? PmfValue::one(m) : PmfValue::zero(m);
  if (t < x) return PmfValue::zero(m);

  const double log_pr = log_or_neg_inf(p.pr());
  const double log_pl = log_or_neg_inf(p.pl());
  const double log_pp = log_or_neg_inf(p.pp());
  const double base = std::log(static_cast<double>(x)) + lf(t - 1);

  // k counts right hops; term k has k rights, x + k lefts and t - x - 2k halts.
  const std::int64_t k_max = (t - x) / 2;
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(k_max) + 1);
  for (std::int64_t k = 0; k <= k_max; ++k) {
    const std::int64_t halts = t - x - 2 * k;
    const double l = base - lf(x + k) - lf(k) - lf(halts) + log_pow(log_pr, k) +
                     log_pow(log_pl, x + k) + log_pow(log_pp, halts);
    if (l > -std::numeric_limits<double>::infinity()) logs.push_back(l);
  }
  const double log_value = log_sum_exp(logs);
  if (!std::isfinite(log_value)) return PmfValue::zero(m);
  return PmfValue::from_log(log_value, m);
}

}  // namespace detail

// Finite all-positive sum
//   sum_k pr^k pl^{x+k} pp^{t-x-2k} x (t-1)! / ((x+k)! k! (t-x-2k)!),
// each term assembled in log space. Works for relaxed parameter triples too.
inline PmfValue pmf(StartPosition x, TimeIndex t, const HopProbabilities& p) {
  detail::require_non_negative(x, t);
  return detail::pmf_sum(x, t, p, [](std::int64_t n) { return log_factorial(n); });
}

inline PmfValue pmf(const PmfQuery& q) { return pmf(q.x, q.t, q.params); }

// Variant backed by a precomputed factorial table, for long t sweeps.
inline PmfValue pmf(StartPosition x, TimeIndex t, const HopProbabilities& p,
                    const LogFactorialTable& table) {
  detail::require_non_negative(x, t);
  return detail::pmf_sum(x, t, p, table);
}

// pl^x pp^{t-x} (t-1)! / ((x-1)! (t-x)!) F((x-t)/2, (x-t+1)/2; x+1; 4 pr pl / pp^2).
inline PmfValue pmf_via_2f1(StartPosition x, TimeIndex t, const HopProbabilities& p) {
  detail::require_non_negative(x, t);
  constexpr Method m = Method::hypergeometric;
  if (p.pp() <= 0.0) {
    throw Error(ErrorCode::DomainError, "hypergeometric form needs pp > 0; use pmf instead");
  }
  if (x < 1) throw Error(ErrorCode::DomainError, "hypergeometric form needs x >= 1");
  // 1/(t-x)! = 0 for t < x.
  if (t < x) return PmfValue::zero(m);

  const double z = 4.0 * p.pr() * p.pl() / (p.pp() * p.pp());
  const double xd = static_cast<double>(x);
  const double td = static_cast<double>(t);
  const SignedLog f = gauss_2f1_terminating_log((xd - td) / 2.0, (xd - td + 1.0) / 2.0, xd + 1.0, z);
  if (f.sign <= 0) return PmfValue::zero(m);

  const double log_value = log_pow(detail::log_or_neg_inf(p.pl()), x) +
                           log_pow(std::log(p.pp()), t - x) + log_factorial(t - 1) -
                           log_factorial(x - 1) - log_factorial(t - x) + f.log_abs;
  if (!std::isfinite(log_value)) return PmfValue::zero(m);
  return PmfValue::from_log(log_value, m);
}

inline PmfValue pmf_via_2f1(const PmfQuery& q) { return pmf_via_2f1(q.x, q.t, q.params); }

}  // namespace ruin
