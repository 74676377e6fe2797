#pragma once

// Terminating Gauss hypergeometric series, Pochhammer symbols, and the
// gamma / 2F1 / Fourier identities behind the closed-form ruin probability.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "ruin/core.hpp"

namespace ruin {

// Rising factorial alpha (alpha + 1) ... (alpha + k - 1); 1 for k = 0.
template <std::floating_point Real>
Real pochhammer(Real alpha, std::int64_t k) {
  if (k < 0) throw Error(ErrorCode::DomainError, "pochhammer: negative k");
  Real prod = 1;
  for (std::int64_t i = 0; i < k; ++i) prod *= alpha + static_cast<Real>(i);
  return prod;
}

inline bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

// A real number held as sign * exp(log_abs); sign 0 means exactly zero.
struct SignedLog {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

namespace detail {

// Number of (possibly) nonzero terms of 2F1(a, b; c; z), or nullopt when
// neither a nor b is a non-positive integer.
inline std::optional<std::int64_t> terminating_term_count(double a, double b) {
  std::optional<std::int64_t> n;
  for (double v : {a, b}) {
    if (is_nonpositive_integer(v)) {
      auto m = static_cast<std::int64_t>(-v) + 1;
      n = n ? std::min(*n, m) : m;
    }
  }
  return n;
}

inline std::int64_t checked_term_count(double a, double b, double c, double z) {
  if (z == 0.0) return 1;
  auto n = terminating_term_count(a, b);
  if (!n) {
    throw Error(ErrorCode::NonTerminatingSeries,
                "2F1 series does not terminate: neither a nor b is a non-positive integer");
  }
  for (std::int64_t k = 0; k + 1 < *n; ++k) {
    if (c + static_cast<double>(k) == 0.0) {
      throw Error(ErrorCode::DomainError, "2F1: (c)_k vanishes before the series terminates");
    }
  }
  return *n;
}

}  // namespace detail

// Sum_k (a)_k (b)_k / (c)_k z^k / k!, over the finitely many nonzero terms,
// accumulated in order k = 0, 1, ... with compensation.
inline double gauss_2f1_terminating(double a, double b, double c, double z) {
  const std::int64_t n = detail::checked_term_count(a, b, c, z);
  CompensatedSum<double> sum;
  double term = 1.0;
  for (std::int64_t k = 0; k < n; ++k) {
    sum += term;
    const double kd = static_cast<double>(k);
    term *= (a + kd) * (b + kd) / ((c + kd) * (kd + 1.0)) * z;
  }
  return sum.value();
}

// Same series with every term kept as a signed log-magnitude, so arguments
// like z = 4 pr pl / pp^2 >> 1 with hundreds of terms neither overflow nor
// underflow.
inline SignedLog gauss_2f1_terminating_log(double a, double b, double c, double z) {
  const std::int64_t n = detail::checked_term_count(a, b, c, z);
  std::vector<double> logs;
  std::vector<int> signs;
  logs.reserve(static_cast<std::size_t>(n));
  signs.reserve(static_cast<std::size_t>(n));

  const double log_z = z == 0.0 ? 0.0 : std::log(std::abs(z));
  const int sign_z = z < 0.0 ? -1 : 1;
  double log_term = 0.0;
  int sign = 1;
  double peak = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < n; ++k) {
    logs.push_back(log_term);
    signs.push_back(sign);
    peak = std::max(peak, log_term);
    const double kd = static_cast<double>(k);
    const double num = (a + kd) * (b + kd);
    const double den = (c + kd) * (kd + 1.0);
    if (num == 0.0) break;
    log_term += std::log(std::abs(num)) - std::log(std::abs(den)) + log_z;
    sign *= (num < 0.0 ? -1 : 1) * (den < 0.0 ? -1 : 1) * sign_z;
  }

  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < logs.size(); ++i) acc += signs[i] * std::exp(logs[i] - peak);
  const double s = acc.value();
  if (s == 0.0) return {};
  return {s < 0.0 ? -1 : 1, peak + std::log(std::abs(s))};
}

// Convergent (non-terminating) series for |z| < 1, truncated once a term
// drops below rel_tol times the partial sum.
template <std::floating_point Real = long double>
Real gauss_2f1_series(Real a, Real b, Real c, Real z, Real rel_tol = Real(1e-17),
                      std::int64_t max_terms = 10'000'000) {
  if (!(std::abs(z) < 1)) throw Error(ErrorCode::DomainError, "2F1 series requires |z| < 1");
  CompensatedSum<Real> sum;
  Real term = 1;
  for (std::int64_t k = 0; k < max_terms; ++k) {
    sum += term;
    if (std::abs(term) < rel_tol * std::abs(sum.value())) break;
    const Real kr = static_cast<Real>(k);
    term *= (a + kr) * (b + kr) / ((c + kr) * (kr + 1)) * z;
    if (term == 0) break;
  }
  return sum.value();
}

// |2F1(x/2, (x+1)/2; x+1; z) - ((2 - 2 sqrt(1 - z)) / z)^x| for 0 < z < 1.
template <std::floating_point Real = long double>
Real elementary_2f1_identity_gap(std::int64_t x, Real z) {
  if (x < 1) throw Error(ErrorCode::DomainError, "elementary 2F1 identity needs x >= 1");
  if (!(z > 0 && z < 1)) throw Error(ErrorCode::DomainError, "elementary 2F1 identity needs 0 < z < 1");
  const Real xr = static_cast<Real>(x);
  const Real lhs = gauss_2f1_series<Real>(xr / 2, (xr + 1) / 2, xr + 1, z);
  // (2 - 2 sqrt(1 - z)) / z rewritten without the cancellation at small z.
  const Real base = 2 / (1 + std::sqrt(1 - z));
  const Real rhs = std::pow(base, xr);
  return std::abs(lhs - rhs);
}

// Gamma(a + k) / Gamma(a) as a signed log. For a <= 0 the ratio is finite
// even when a is a pole; it is evaluated through the reflection formula
//   Gamma(a + k) / Gamma(a) = (-1)^k Gamma(1 - a) / Gamma(1 - a - k),
// which requires 1 - a - k > 0.
inline SignedLog log_gamma_ratio(long double a, std::int64_t k) {
  if (k < 0) throw Error(ErrorCode::DomainError, "log_gamma_ratio: negative k");
  if (k == 0) return {1, 0.0};
  const long double kd = static_cast<long double>(k);
  if (a > 0) {
    return {1, static_cast<double>(std::lgamma(a + kd) - std::lgamma(a))};
  }
  if (!(1 - a - kd > 0)) {
    return {};  // the product passes through zero
  }
  const int parity = (k % 2 == 0) ? 1 : -1;
  // Gamma(1 - a) and Gamma(1 - a - k) have positive arguments here.
  return {parity, static_cast<double>(std::lgamma(1 - a) - std::lgamma(1 - a - kd))};
}

// Relative gap between 1 / (t - x - 2k)! and its gamma-function rewriting
//   1/Gamma(t+1-x) * Gamma(h' + 1/2 + k) Gamma(h' + k) / (Gamma(h' + 1/2) Gamma(h')) * 4^k
// with h' = (x - t)/2, using parity-tracked log-magnitudes.
inline double gamma_expression_identity_gap(std::int64_t x, std::int64_t t, std::int64_t k) {
  if (x < 1 || t <= x) throw Error(ErrorCode::DomainError, "gamma identity needs 1 <= x < t");
  if (k < 0 || t - x - 2 * k < 0) {
    throw Error(ErrorCode::DomainError, "gamma identity needs t - x - 2k >= 0");
  }
  const long double half_gap = static_cast<long double>(x - t) / 2;
  const SignedLog r1 = log_gamma_ratio(half_gap + 0.5L, k);
  const SignedLog r2 = log_gamma_ratio(half_gap, k);
  const int sign = r1.sign * r2.sign;
  if (sign == 0) return 1.0;

  const long double log_rhs = static_cast<long double>(r1.log_abs) + r2.log_abs +
                              2 * static_cast<long double>(k) * std::numbers::ln2_v<long double> -
                              std::lgamma(static_cast<long double>(t + 1 - x));
  const long double log_lhs = -std::lgamma(static_cast<long double>(t - x - 2 * k + 1));
  const long double ratio = sign * std::exp(log_rhs - log_lhs);
  return static_cast<double>(std::abs(ratio - 1));
}

// Coefficients of cos^{t-1}(theta) = sum_k coeff_k cos((2k - t + 1) theta),
// i.e. binom(t-1, k) / 2^{t-1} for k = 0 .. t-1.
inline std::vector<double> cos_power_fourier_coeffs(std::int64_t t) {
  if (t < 1) throw Error(ErrorCode::DomainError, "cos_power_fourier_coeffs needs t >= 1");
  const std::int64_t n = t - 1;
  std::vector<double> coeffs(static_cast<std::size_t>(t));
  const double log_scale = log_factorial(n) - static_cast<double>(n) * std::numbers::ln2;
  for (std::int64_t k = 0; k <= n; ++k) {
    coeffs[static_cast<std::size_t>(k)] =
        std::exp(log_scale - log_factorial(k) - log_factorial(n - k));
  }
  return coeffs;
}

}  // namespace ruin
