#pragma once

// Parameter objects, error codes and numeric helpers shared by every module.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ruin {

using StartPosition = std::int64_t;
using TimeIndex = std::int64_t;

enum class ErrorCode {
  NegativeProbability,
  SimplexViolation,
  NonTerminatingSeries,
  DomainError,
  ParameterError,
  CapacityError,
  DivergentMoment,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::SimplexViolation: return "SimplexViolation";
    case ErrorCode::NonTerminatingSeries: return "NonTerminatingSeries";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParameterError: return "ParameterError";
    case ErrorCode::CapacityError: return "CapacityError";
    case ErrorCode::DivergentMoment: return "DivergentMoment";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr double kSimplexTolerance = 1e-12;

enum class Strictness { strict, relaxed };

// (pr, pl, pp): probabilities of a right hop, a left hop and a halt.
// Relaxed triples skip the simplex constraint; they exist for the series
// identities where the three weights are independent.
class HopProbabilities {
 public:
  static HopProbabilities make(double pr, double pl, double pp,
                               Strictness mode = Strictness::strict) {
    if (!std::isfinite(pr) || !std::isfinite(pl) || !std::isfinite(pp)) {
      throw Error(ErrorCode::ParameterError, "hop probabilities must be finite");
    }
    if (pr < 0.0 || pl < 0.0 || pp < 0.0) {
      throw Error(ErrorCode::NegativeProbability,
                  "hop probabilities must be non-negative");
    }
    if (mode == Strictness::strict) {
      if (pr > 1.0 || pl > 1.0 || pp > 1.0 ||
          std::abs(pr + pl + pp - 1.0) > kSimplexTolerance) {
        throw Error(ErrorCode::SimplexViolation,
                    "pr + pl + pp must equal 1 (got " +
                        std::to_string(pr + pl + pp) + ")");
      }
    }
    return HopProbabilities(pr, pl, pp, mode);
  }

  // pp = 1 - pr - pl, with a tiny negative remainder from rounding clamped to 0.
  static HopProbabilities with_inferred_halt(double pr, double pl) {
    double pp = 1.0 - pr - pl;
    if (pp < 0.0 && pp > -kSimplexTolerance) pp = 0.0;
    return make(pr, pl, pp, Strictness::strict);
  }

  double pr() const noexcept { return pr_; }
  double pl() const noexcept { return pl_; }
  double pp() const noexcept { return pp_; }
  bool strict() const noexcept { return mode_ == Strictness::strict; }

  double delta_p() const noexcept { return pl_ - pr_; }
  // Base of the geometric long-time tail; <= 1 on the simplex, = 1 iff pr == pl.
  double decay_rate() const noexcept { return pp_ + 2.0 * std::sqrt(pr_ * pl_); }

 private:
  HopProbabilities(double pr, double pl, double pp, Strictness mode)
      : pr_(pr), pl_(pl), pp_(pp), mode_(mode) {}

  double pr_;
  double pl_;
  double pp_;
  Strictness mode_;
};

enum class Method { closed_form, hypergeometric, dp, integral, monte_carlo, asymptotic };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "exact";
    case Method::hypergeometric: return "hyp";
    case Method::dp: return "dp";
    case Method::integral: return "integral";
    case Method::monte_carlo: return "mc";
    case Method::asymptotic: return "asymptotic";
  }
  return "unknown";
}

struct PmfValue {
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
  Method method = Method::closed_form;

  static PmfValue zero(Method m) { return {0.0, -std::numeric_limits<double>::infinity(), m}; }
  static PmfValue one(Method m) { return {1.0, 0.0, m}; }
  static PmfValue from_log(double log_value, Method m) {
    return {std::exp(log_value), log_value, m};
  }
  static PmfValue from_value(double value, Method m) {
    return {value, value > 0.0 ? std::log(value) : -std::numeric_limits<double>::infinity(), m};
  }
};

namespace detail {

inline constexpr std::array<std::uint64_t, 21> kSmallFactorials = [] {
  std::array<std::uint64_t, 21> f{};
  f[0] = 1;
  for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * i;
  return f;
}();

}  // namespace detail

// ln(n!). Exact integer factorial through n = 20, lgamma beyond.
inline double log_factorial(std::int64_t n) {
  if (n < 0) throw Error(ErrorCode::DomainError, "log_factorial of a negative integer");
  if (n < static_cast<std::int64_t>(detail::kSmallFactorials.size())) {
    return std::log(static_cast<double>(detail::kSmallFactorials[static_cast<std::size_t>(n)]));
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

// Precomputed ln(n!) for 0 <= n <= n_max; larger n fall through to log_factorial.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(std::int64_t n_max) : table_(static_cast<std::size_t>(n_max) + 1) {
    for (std::int64_t n = 0; n <= n_max; ++n) table_[static_cast<std::size_t>(n)] = log_factorial(n);
  }

  double operator()(std::int64_t n) const {
    if (n >= 0 && n < static_cast<std::int64_t>(table_.size())) {
      return table_[static_cast<std::size_t>(n)];
    }
    return log_factorial(n);
  }

  std::int64_t n_max() const { return static_cast<std::int64_t>(table_.size()) - 1; }

 private:
  std::vector<double> table_;
};

// n * ln(base) with the 0^0 = 1 convention (log_base may be -inf).
inline double log_pow(double log_base, std::int64_t n) {
  return n == 0 ? 0.0 : static_cast<double>(n) * log_base;
}

// Kahan–Babuška (Neumaier) compensated accumulator.
template <typename Real = double>
class CompensatedSum {
 public:
  void add(Real v) {
    Real t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(Real v) {
    add(v);
    return *this;
  }
  Real value() const { return sum_ + comp_; }

 private:
  Real sum_ = 0;
  Real comp_ = 0;
};

// ln(sum exp(terms)); -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> log_terms) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double l : log_terms) peak = std::max(peak, l);
  if (!std::isfinite(peak)) return peak;
  CompensatedSum<double> acc;
  for (double l : log_terms) acc += std::exp(l - peak);
  return peak + std::log(acc.value());
}

}  // namespace ruin
