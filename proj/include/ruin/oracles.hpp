#pragma once

// Independent routes to P(x, t): the first-step recursion on a grid,
// quadrature of the integral representation, and direct simulation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "ruin/core.hpp"
#include "ruin/exact.hpp"

namespace ruin {

// ---------------------------------------------------------------------------
// Recursion grid
// ---------------------------------------------------------------------------

struct DpOptions {
  // Upper bound on stored entries (x_max + 1) * (t_max + 1).
  std::size_t max_entries = 100'000'000;
};

class DpGrid {
 public:
  DpGrid(StartPosition x_max, TimeIndex t_max, HopProbabilities params)
      : x_max_(x_max),
        t_max_(t_max),
        params_(params),
        values_(static_cast<std::size_t>(x_max + 1) * static_cast<std::size_t>(t_max + 1), 0.0) {}

  StartPosition x_max() const { return x_max_; }
  TimeIndex t_max() const { return t_max_; }
  const HopProbabilities& params() const { return params_; }

  double at(StartPosition x, TimeIndex t) const { return values_[index(x, t)]; }
  double& at(StartPosition x, TimeIndex t) { return values_[index(x, t)]; }

  // Sum over t = 0..t_max of P(x, t).
  double row_sum(StartPosition x) const {
    CompensatedSum<double> s;
    for (TimeIndex t = 0; t <= t_max_; ++t) s += at(x, t);
    return s.value();
  }

 private:
  std::size_t index(StartPosition x, TimeIndex t) const {
    if (x < 0 || x > x_max_ || t < 0 || t > t_max_) {
      throw Error(ErrorCode::DomainError, "DpGrid index out of range");
    }
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(t_max_ + 1) +
           static_cast<std::size_t>(t);
  }

  StartPosition x_max_;
  TimeIndex t_max_;
  HopProbabilities params_;
  std::vector<double> values_;
};

namespace detail {

inline void require_dp_args(StartPosition x_max, TimeIndex t_max, const HopProbabilities& p) {
  if (!p.strict()) throw Error(ErrorCode::ParameterError, "recursion grid needs strict parameters");
  if (x_max < 1) throw Error(ErrorCode::DomainError, "recursion grid needs x_max >= 1");
  if (t_max < 0) throw Error(ErrorCode::DomainError, "recursion grid needs t_max >= 0");
}

// Runs P(x, t+1) = pr P(x+1, t) + pl P(x-1, t) + pp P(x, t) column by column
// with two rolling buffers; sink(t, column) sees every column t = 0..t_max.
// Column t only needs rows x <= min(t, x_max + t_max - t): P vanishes for
// x > t, and higher rows can no longer influence rows <= x_max by t_max.
template <typename Sink>
void run_recursion(StartPosition x_max, TimeIndex t_max, const HopProbabilities& p, Sink&& sink) {
  const std::int64_t width = std::max<std::int64_t>(x_max, t_max) + 3;
  std::vector<double> cur(static_cast<std::size_t>(width), 0.0);
  std::vector<double> nxt(static_cast<std::size_t>(width), 0.0);
  cur[0] = 1.0;
  sink(TimeIndex{0}, std::as_const(cur));
  const double pr = p.pr(), pl = p.pl(), pp = p.pp();
  const std::int64_t span_limit = x_max + t_max;
  for (TimeIndex t = 0; t < t_max; ++t) {
    const std::int64_t hi = std::min<std::int64_t>(t + 1, span_limit - (t + 1));
    nxt[0] = 0.0;
    for (std::int64_t x = 1; x <= hi; ++x) {
      nxt[static_cast<std::size_t>(x)] = pr * cur[static_cast<std::size_t>(x + 1)] +
                                         pl * cur[static_cast<std::size_t>(x - 1)] +
                                         pp * cur[static_cast<std::size_t>(x)];
    }
    std::swap(cur, nxt);
    sink(t + 1, std::as_const(cur));
  }
}

}  // namespace detail

// Full table P(x, t) for 0 <= x <= x_max, 0 <= t <= t_max.
inline DpGrid dp_grid(StartPosition x_max, TimeIndex t_max, const HopProbabilities& p,
                      const DpOptions& options = {}) {
  detail::require_dp_args(x_max, t_max, p);
  const double entries = static_cast<double>(x_max + 1) * static_cast<double>(t_max + 1);
  if (entries > static_cast<double>(options.max_entries)) {
    throw Error(ErrorCode::CapacityError,
                "recursion grid of " + std::to_string(static_cast<long long>(entries)) +
                    " entries exceeds the memory budget");
  }
  DpGrid grid(x_max, t_max, p);
  detail::run_recursion(x_max, t_max, p, [&](TimeIndex t, const std::vector<double>& col) {
    for (StartPosition x = 0; x <= x_max; ++x) grid.at(x, t) = col[static_cast<std::size_t>(x)];
  });
  return grid;
}

// Only the final column P(0..x_max, t_max); memory O(max(x_max, t_max)).
inline std::vector<double> dp_column(StartPosition x_max, TimeIndex t_max, const HopProbabilities& p) {
  detail::require_dp_args(x_max, t_max, p);
  std::vector<double> out;
  detail::run_recursion(x_max, t_max, p, [&](TimeIndex t, const std::vector<double>& col) {
    if (t == t_max) out.assign(col.begin(), col.begin() + x_max + 1);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Gauss–Legendre quadrature on [0, 1]
// ---------------------------------------------------------------------------

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// Newton iteration on P_n from the Chebyshev-like initial guesses.
inline GaussLegendreRule make_gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::DomainError, "Gauss-Legendre rule needs n >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double deriv = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      deriv = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / deriv;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Weight on [-1, 1] is 2 / ((1 - z^2) P_n'(z)^2); halved for [0, 1].
    const double w = 1.0 / ((1.0 - z * z) * deriv * deriv);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - z);
    rule.nodes[hi] = 0.5 * (1.0 + z);
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  return rule;
}

// Rules are memoized per node count; a rule never changes once built.
inline std::shared_ptr<const GaussLegendreRule> gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const GaussLegendreRule>(make_gauss_legendre(n));
  return slot;
}

// Integrands are trigonometric polynomials of degree <= t + x in pi*phi.
inline int default_node_count(StartPosition x, TimeIndex t) {
  return static_cast<int>(std::max<std::int64_t>(64, t + x + 16));
}

// int_0^1 cos^{t-1}(pi phi) sin(pi phi) sin(pi x phi) dphi by quadrature.
inline double trig_integral(StartPosition x, TimeIndex t, int nodes = 0) {
  if (x < 1 || t < 1) throw Error(ErrorCode::DomainError, "trig_integral needs x >= 1, t >= 1");
  const auto rule = gauss_legendre(nodes > 0 ? nodes : default_node_count(x, t));
  const double xd = static_cast<double>(x);
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < rule->size(); ++i) {
    const double th = std::numbers::pi * rule->nodes[i];
    acc += rule->weights[i] * std::pow(std::cos(th), static_cast<double>(t - 1)) * std::sin(th) *
           std::sin(xd * th);
  }
  return acc.value();
}

namespace detail {

inline void require_integral_args(StartPosition x, TimeIndex t, const HopProbabilities& p) {
  if (!p.strict()) throw Error(ErrorCode::ParameterError, "integral form needs strict parameters");
  if (p.pr() <= 0.0 || p.pl() <= 0.0) {
    throw Error(ErrorCode::DomainError, "integral form needs pr > 0 and pl > 0");
  }
  if (x < 1 || t < 1) throw Error(ErrorCode::DomainError, "integral form needs x >= 1, t >= 1");
}

}  // namespace detail

// 2 pr^{(1-x)/2} pl^{(1+x)/2} int_0^1 (pp + 2 sqrt(pr pl) cos pi phi)^{t-1}
//   sin(pi phi) sin(pi x phi) dphi, integrated along the real axis.
// Accurate to ~1e-16 times the prefactor, so only well conditioned for pl <= pr.
inline PmfValue pmf_integral_real_axis(StartPosition x, TimeIndex t, const HopProbabilities& p,
                                       int nodes = 0) {
  detail::require_integral_args(x, t, p);
  const auto rule = gauss_legendre(nodes > 0 ? nodes : default_node_count(x, t));
  const double amp = 2.0 * std::sqrt(p.pr() * p.pl());
  const double xd = static_cast<double>(x);
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < rule->size(); ++i) {
    const double th = std::numbers::pi * rule->nodes[i];
    acc += rule->weights[i] * std::pow(p.pp() + amp * std::cos(th), static_cast<double>(t - 1)) *
           std::sin(th) * std::sin(xd * th);
  }
  const double log_prefactor = std::log(2.0) + 0.5 * (1.0 - xd) * std::log(p.pr()) +
                               0.5 * (1.0 + xd) * std::log(p.pl());
  return PmfValue::from_value(std::max(0.0, std::exp(log_prefactor) * acc.value()), Method::integral);
}

// The same integral on the shifted contour Im(pi phi) = ln sqrt(pl/pr). The
// integrand is entire and 2*pi-periodic, so the value is unchanged, and on
// this line the prefactor cancels exactly:
//   P = int_0^1 Re[(pp + pr e^{i th} + pl e^{-i th})^{t-1}
//                  (pl e^{i(x-1) th} - pr e^{i(x+1) th})] dphi,  th = pi phi.
// The integrand is bounded by 1, so the absolute error stays near 1e-15.
inline PmfValue pmf_integral_shifted(StartPosition x, TimeIndex t, const HopProbabilities& p,
                                     int nodes = 0) {
  detail::require_integral_args(x, t, p);
  const auto rule = gauss_legendre(nodes > 0 ? nodes : default_node_count(x, t));
  const double xd = static_cast<double>(x);
  const double n = static_cast<double>(t - 1);
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < rule->size(); ++i) {
    const double th = std::numbers::pi * rule->nodes[i];
    const std::complex<double> e = std::polar(1.0, th);
    const std::complex<double> step = p.pp() + p.pr() * e + p.pl() * std::conj(e);
    const std::complex<double> power =
        t == 1 ? std::complex<double>(1.0) : std::polar(std::pow(std::abs(step), n), n * std::arg(step));
    const std::complex<double> tail =
        p.pl() * std::polar(1.0, (xd - 1.0) * th) - p.pr() * std::polar(1.0, (xd + 1.0) * th);
    acc += rule->weights[i] * (power * tail).real();
  }
  return PmfValue::from_value(std::max(0.0, acc.value()), Method::integral);
}

// Quadrature route for P(x, t): real axis when pl <= pr, shifted contour otherwise.
inline PmfValue pmf_integral(StartPosition x, TimeIndex t, const HopProbabilities& p) {
  detail::require_integral_args(x, t, p);
  return p.pl() <= p.pr() ? pmf_integral_real_axis(x, t, p) : pmf_integral_shifted(x, t, p);
}

inline PmfValue pmf_integral(const PmfQuery& q) { return pmf_integral(q.x, q.t, q.params); }

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

inline constexpr std::string_view kRngAlgorithm = "splitmix64-substream-v1";

// SplitMix64 sequence whose starting state is derived from (seed, stream);
// sample i of a run always draws from stream i.
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(seed + mix(stream ^ 0xD1B54A32D192ED03ULL))) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Walk from x until the origin is hit (returns the hitting time) or t_cap
// steps pass without absorption (returns nullopt). A uniform draw u picks
// right for u < pr, left for u < pr + pl, halt otherwise.
template <typename Rng>
std::optional<TimeIndex> simulate_one(StartPosition x, const HopProbabilities& p, TimeIndex t_cap,
                                      Rng& rng) {
  if (x < 0) throw Error(ErrorCode::DomainError, "start position must be >= 0");
  if (x == 0) return TimeIndex{0};
  const double right = p.pr();
  const double right_or_left = p.pr() + p.pl();
  StartPosition pos = x;
  for (TimeIndex t = 1; t <= t_cap; ++t) {
    const double u = rng.uniform();
    if (u < right) {
      ++pos;
    } else if (u < right_or_left) {
      if (--pos == 0) return t;
    }
  }
  return std::nullopt;
}

struct EmpiricalPmf {
  StartPosition x = 0;
  HopProbabilities params;
  TimeIndex t_cap = 0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string rng_algorithm{kRngAlgorithm};
  std::vector<std::uint64_t> counts;  // counts[t] for t = 0..t_cap
  std::uint64_t censored = 0;         // walks still alive at t_cap

  double frequency(TimeIndex t) const {
    return static_cast<double>(counts.at(static_cast<std::size_t>(t))) / static_cast<double>(n_samples);
  }
};

// Histogram of hitting times over n_samples walks. Sample i uses substream i
// of the seed, so the result does not depend on the worker count.
inline EmpiricalPmf empirical_pmf(StartPosition x, const HopProbabilities& p, std::uint64_t n_samples,
                                  TimeIndex t_cap, std::uint64_t seed, unsigned workers = 1) {
  if (!p.strict()) throw Error(ErrorCode::ParameterError, "simulation needs strict parameters");
  if (n_samples < 1) throw Error(ErrorCode::DomainError, "simulation needs n_samples >= 1");
  if (t_cap < 1) throw Error(ErrorCode::DomainError, "simulation needs t_cap >= 1");
  if (x < 0) throw Error(ErrorCode::DomainError, "start position must be >= 0");
  workers = std::max(1u, workers);

  EmpiricalPmf out{x, p, t_cap, n_samples, seed, std::string(kRngAlgorithm),
                   std::vector<std::uint64_t>(static_cast<std::size_t>(t_cap) + 1, 0), 0};

  struct Partial {
    std::vector<std::uint64_t> counts;
    std::uint64_t censored = 0;
  };
  std::vector<Partial> partials(workers);
  auto run_block = [&](unsigned w) {
    Partial& part = partials[w];
    part.counts.assign(static_cast<std::size_t>(t_cap) + 1, 0);
    const std::uint64_t begin = n_samples * w / workers;
    const std::uint64_t end = n_samples * (w + 1) / workers;
    for (std::uint64_t i = begin; i < end; ++i) {
      SubstreamRng rng(seed, i);
      if (auto hit = simulate_one(x, p, t_cap, rng)) {
        ++part.counts[static_cast<std::size_t>(*hit)];
      } else {
        ++part.censored;
      }
    }
  };
  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
    for (auto& th : pool) th.join();
  }
  for (const Partial& part : partials) {
    for (std::size_t t = 0; t < out.counts.size(); ++t) out.counts[t] += part.counts[t];
    out.censored += part.censored;
  }
  return out;
}

}  // namespace ruin
