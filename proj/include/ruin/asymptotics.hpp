#pragma once

// Long-time behaviour of P(x, t), the continuum (inverse Gaussian) limit,
// and the infinite-series identity that mixes the hypergeometric solution
// with the moment generating function.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "ruin/core.hpp"
#include "ruin/exact.hpp"

namespace ruin {

inline double decay_rate(const HopProbabilities& p) { return p.decay_rate(); }

// P(x, t) ~ prefactor * decay_rate^{t-1} * t^{power} for large t.
struct AsymptoticForm {
  double log_prefactor = 0.0;
  double decay_rate = 1.0;
  double power = -1.5;

  double prefactor() const { return std::exp(log_prefactor); }

  double log_at(TimeIndex t) const {
    const double td = static_cast<double>(t);
    return log_prefactor + (td - 1.0) * std::log(decay_rate) + power * std::log(td);
  }
};

//   x / (2 sqrt(pi)) pr^{(1-x)/2} pl^{(1+x)/2} (r / sqrt(pr pl))^{3/2},  r = pp + 2 sqrt(pr pl)
inline AsymptoticForm asymptotic_form(StartPosition x, const HopProbabilities& p) {
  if (x < 1) throw Error(ErrorCode::DomainError, "asymptotic form needs x >= 1");
  if (p.pr() <= 0.0 || p.pl() <= 0.0) {
    throw Error(ErrorCode::DomainError, "asymptotic form needs pr * pl > 0");
  }
  const double xd = static_cast<double>(x);
  const double log_pr = std::log(p.pr());
  const double log_pl = std::log(p.pl());
  const double r = p.decay_rate();
  AsymptoticForm form;
  form.decay_rate = r;
  form.log_prefactor = std::log(xd) - std::log(2.0 * std::sqrt(std::numbers::pi)) +
                       0.5 * (1.0 - xd) * log_pr + 0.5 * (1.0 + xd) * log_pl +
                       1.5 * (std::log(r) - 0.5 * (log_pr + log_pl));
  return form;
}

inline PmfValue asymptotic_pmf(StartPosition x, TimeIndex t, const HopProbabilities& p) {
  if (t < 1) throw Error(ErrorCode::DomainError, "asymptotic form needs t >= 1");
  return PmfValue::from_log(asymptotic_form(x, p).log_at(t), Method::asymptotic);
}

// Symmetric case pr = pl = p: x / (2 sqrt(pi p)) t^{-3/2}.
inline double power_law_pmf(StartPosition x, TimeIndex t, double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::DomainError, "power law needs p > 0");
  if (t < 1) throw Error(ErrorCode::DomainError, "power law needs t >= 1");
  const double td = static_cast<double>(t);
  return static_cast<double>(x) / (2.0 * std::sqrt(std::numbers::pi * p)) / (td * std::sqrt(td));
}

// ---------------------------------------------------------------------------
// Continuum limit
// ---------------------------------------------------------------------------

// v: drift (pr - pl) delta / epsilon, so v < 0 pulls toward the origin.
// D: diffusion coefficient of the non-halting walk. pp: halting probability.
struct ContinuumParams {
  double v = 0.0;
  double D = 1.0;
  double pp = 0.0;

  static ContinuumParams make(double v, double D, double pp) {
    if (!std::isfinite(v)) throw Error(ErrorCode::DomainError, "drift must be finite");
    if (!(D > 0.0)) throw Error(ErrorCode::DomainError, "diffusion coefficient must be > 0");
    if (!(pp >= 0.0 && pp < 1.0)) throw Error(ErrorCode::DomainError, "need 0 <= pp < 1");
    return {v, D, pp};
  }

  double effective_diffusion() const { return (1.0 - pp) * D; }
};

// xi / sqrt(4 pi (1-pp) D tau^3) exp(-(xi + v tau)^2 / (4 (1-pp) D tau)).
inline double inverse_gaussian_density(double xi, double tau, const ContinuumParams& cp) {
  if (!(xi > 0.0) || !(tau > 0.0)) {
    throw Error(ErrorCode::DomainError, "inverse Gaussian density needs xi > 0 and tau > 0");
  }
  const double dd = cp.effective_diffusion();
  // (xi + v tau)^2 / tau expanded so extreme tau gives no inf/inf or inf*0.
  const double drift_term = cp.v == 0.0 ? 0.0 : cp.v * cp.v * tau;
  const double quad = xi * xi / tau + 2.0 * xi * cp.v + drift_term;
  const double log_rho = std::log(xi) - 0.5 * std::log(4.0 * std::numbers::pi * dd) - 1.5 * std::log(tau) -
                         quad / (4.0 * dd);
  return std::exp(log_rho);
}

// int_0^inf rho(xi, tau) dtau by double-exponential quadrature.
inline double inverse_gaussian_mass(double xi, const ContinuumParams& cp, double tolerance = 1e-12) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double tau) { return tau > 0.0 ? inverse_gaussian_density(xi, tau, cp) : 0.0; };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), tolerance);
}

// ---------------------------------------------------------------------------
// Series identity
// ---------------------------------------------------------------------------

// With pr = z/4, pl = pp = 1 (relaxed weights), the generating function gives
//   sum_t e^{st} binom(t-1, x-1) F((x-t)/2, (x-t+1)/2; x+1; z)
//     = (w - sqrt(w^2 - 4/z))^x,   w = 2 (e^{-s} - 1) / z.
// Returns |partial sum through t_trunc - right-hand side|.
inline double series_identity_gap(StartPosition x, double z, TimeIndex t_trunc,
                                  double s = -std::numbers::ln2) {
  if (x < 1) throw Error(ErrorCode::DomainError, "series identity needs x >= 1");
  if (!(z > 0.0 && z < 1.0)) throw Error(ErrorCode::DomainError, "series identity needs 0 < z < 1");
  if (t_trunc < x) throw Error(ErrorCode::DomainError, "series identity needs t_trunc >= x");
  // Terms decay like (e^s (1 + sqrt z))^t.
  if (!(std::exp(s) * (1.0 + std::sqrt(z)) < 1.0)) {
    throw Error(ErrorCode::DomainError, "series identity diverges for this (z, s)");
  }
  const auto weights = HopProbabilities::make(z / 4.0, 1.0, 1.0, Strictness::relaxed);
  CompensatedSum<double> lhs;
  for (TimeIndex t = x; t <= t_trunc; ++t) {
    const PmfValue term = pmf_via_2f1(x, t, weights);
    if (term.value > 0.0) lhs += std::exp(s * static_cast<double>(t) + term.log_value);
  }
  const double w = 2.0 * (std::exp(-s) - 1.0) / z;
  const double root = (4.0 / z) / (w + std::sqrt(w * w - 4.0 / z));
  return std::abs(lhs.value() - std::pow(root, static_cast<double>(x)));
}

// ---------------------------------------------------------------------------
// Tail extrapolation and fits
// ---------------------------------------------------------------------------

// Hurwitz zeta sum_{n>=0} (a + n)^{-s} for s > 1, a > 0 (Euler–Maclaurin).
inline double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0)) throw Error(ErrorCode::DomainError, "hurwitz_zeta needs s > 1, a > 0");
  CompensatedSum<double> head;
  while (a < 30.0) {
    head += std::pow(a, -s);
    a += 1.0;
  }
  // B2/2!, B4/4!, B6/6!, B8/8!
  constexpr double bern[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
  double tail = std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  double rising = s;             // s (s+1) ... (s + 2j - 2)
  double power = std::pow(a, -s - 1.0);
  for (int j = 0; j < 4; ++j) {
    tail += bern[j] * rising * power;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power /= a * a;
  }
  return head.value() + tail;
}

// Estimate of sum_{u > t} P(x, u) from the last computed value P(x, t), using
// the long-time shape P(u) ~ r^u u^{-3/2}. period = 2 for walks without
// halting, whose mass sits on one parity class only.
inline double tail_mass_estimate(double p_last, TimeIndex t_last, double rate, int period = 1) {
  if (p_last <= 0.0) return 0.0;
  if (t_last < 1) throw Error(ErrorCode::DomainError, "tail estimate needs t >= 1");
  const double t = static_cast<double>(t_last);
  const double r = std::pow(rate, static_cast<double>(period));
  const double h = static_cast<double>(period);
  const double log_r = std::log(r);
  if (log_r > -1e-9) {
    // Power law: sum_{m>=1} (t / (t + h m))^{3/2} = (t/h)^{3/2} zeta(3/2, t/h + 1).
    return p_last * std::pow(t / h, 1.5) * hurwitz_zeta(1.5, t / h + 1.0);
  }
  CompensatedSum<double> acc;
  const double cutoff = 60.0 / -log_r;
  for (double m = 1.0; m <= cutoff; m += 1.0) {
    acc += std::exp(m * log_r) * std::pow(t / (t + h * m), 1.5);
  }
  return p_last * acc.value();
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
inline LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::DomainError, "least squares needs >= 2 paired samples");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace ruin
