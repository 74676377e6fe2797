#pragma once

// Moment generating function, closed-form moments, arbitrary-order moment
// polynomials and the total ruin probability for the duration T_x.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "ruin/core.hpp"

namespace ruin {

struct MgfValue {
  double value = 0.0;
  double s = 0.0;
  double s_max = 0.0;
};

// Largest s for which M_x(s) is finite: -ln(pp + 2 sqrt(pr pl)).
inline double mgf_s_max(const HopProbabilities& p) { return -std::log(p.decay_rate()); }

// M_x(s) = sum_t e^{st} P(x, t). The root (e^{-s}-pp)/(2pr) - sqrt(...) is
// evaluated in its rationalized form 2 pl / (e^{-s} - pp + sqrt((e^{-s}-pp)^2 - 4 pr pl)),
// which avoids the cancellation for small pr.
inline MgfValue mgf(StartPosition x, double s, const HopProbabilities& p) {
  if (x < 0) throw Error(ErrorCode::DomainError, "start position must be >= 0");
  if (!p.strict()) throw Error(ErrorCode::ParameterError, "mgf needs strict parameters");
  const double s_max = mgf_s_max(p);
  if (s > s_max) {
    if (s - s_max > 1e-14) {
      throw Error(ErrorCode::DomainError,
                  "mgf argument s exceeds s_max = " + std::to_string(s_max));
    }
    s = s_max;
  }
  if (x == 0) return {1.0, s, s_max};

  const double shifted = std::exp(-s) - p.pp();
  double root = 0.0;
  if (p.pr() == 0.0) {
    // pr -> 0 limit: each unit of distance costs a geometric number of halts.
    root = p.pl() / shifted;
  } else {
    const double disc = std::max(0.0, shifted * shifted - 4.0 * p.pr() * p.pl());
    root = 2.0 * p.pl() / (shifted + std::sqrt(disc));
  }
  return {std::pow(root, static_cast<double>(x)), s, s_max};
}

// Probability that the origin is ever reached: 1 if pl >= pr, else (pl/pr)^x.
inline double total_ruin_probability(StartPosition x, const HopProbabilities& p) {
  if (x < 0) throw Error(ErrorCode::DomainError, "start position must be >= 0");
  if (x == 0 || p.pl() >= p.pr()) return 1.0;
  return std::pow(p.pl() / p.pr(), static_cast<double>(x));
}

namespace detail {

inline double drift_or_throw(const HopProbabilities& p) {
  const double d = p.pl() - p.pr();
  if (!(d > 0.0)) {
    throw Error(ErrorCode::DivergentMoment,
                "moments of the duration need pl > pr (pl - pr = " + std::to_string(d) + ")");
  }
  return d;
}

}  // namespace detail

// <T_x> = x / (pl - pr).
inline double mean(StartPosition x, const HopProbabilities& p) {
  return static_cast<double>(x) / detail::drift_or_throw(p);
}

// Var(T_x) = ((pl + pr)/(pl - pr)^3 - 1/(pl - pr)) x.
inline double variance(StartPosition x, const HopProbabilities& p) {
  const double d = detail::drift_or_throw(p);
  const double s = p.pl() + p.pr();
  return (s / (d * d * d) - 1.0 / d) * static_cast<double>(x);
}

inline double second_moment(StartPosition x, const HopProbabilities& p) {
  const double d = detail::drift_or_throw(p);
  const double xd = static_cast<double>(x);
  return xd * xd / (d * d) + variance(x, p);
}

// Same quantity with the linear coefficient written as (pp(1-pp) + 4 pr pl) / (pl-pr)^3.
inline double second_moment_halting_form(StartPosition x, const HopProbabilities& p) {
  const double d = detail::drift_or_throw(p);
  const double xd = static_cast<double>(x);
  const double pp = p.pp();
  return xd * xd / (d * d) + (pp * (1.0 - pp) + 4.0 * p.pr() * p.pl()) / (d * d * d) * xd;
}

// <T_x^3> = x^3/d^3 + 3 x^2/d ((pl+pr)/d^3 - 1/d)
//         + ((2 (pl+pr)^2 + 4 pl pr)/d^5 - 3 (pl+pr)/d^3 + 1/d) x,   d = pl - pr.
inline double third_moment(StartPosition x, const HopProbabilities& p) {
  const double d = detail::drift_or_throw(p);
  const double s = p.pl() + p.pr();
  const double xd = static_cast<double>(x);
  const double d3 = d * d * d;
  const double c3 = 1.0 / d3;
  const double c2 = 3.0 / d * (s / d3 - 1.0 / d);
  const double c1 = (2.0 * s * s + 4.0 * p.pl() * p.pr()) / (d3 * d * d) - 3.0 * s / d3 + 1.0 / d;
  return ((c3 * xd + c2) * xd + c1) * xd;
}

// <T_x^k> = sum_{i=1}^{k} C_i x^i; coeffs[i] holds C_i and coeffs[0] is the
// constant term (zero for k >= 1, one for k = 0).
template <typename Scalar>
struct MomentPolynomial {
  int order = 0;
  std::vector<Scalar> coeffs;

  Scalar operator()(const Scalar& x) const {
    Scalar acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
};

// Moment polynomials of orders 0..max_order, built bottom-up. Order k solves
//   pr m(x+1) - (pr+pl) m(x) + pl m(x-1) = sum_{j<k} C(k,j) (-1)^{k-j} m_j(x)
// with a polynomial ansatz; the homogeneous solutions A + B (pl/pr)^x are
// excluded (B = 0 from the pr -> 0 limit, A = 0 from <T_0^k> = 0). The
// operator on the left lowers degree by one with leading factor -(i)(pl-pr),
// so the coefficients follow from a triangular back-substitution.
// A ladder is immutable once built and can be shared across threads.
template <typename Scalar>
class MomentLadder {
 public:
  MomentLadder(Scalar pr, Scalar pl, int max_order) : pr_(pr), pl_(pl) {
    if (!(pl_ > pr_)) {
      throw Error(ErrorCode::DivergentMoment, "moment polynomials need pl > pr");
    }
    if (max_order < 0) throw Error(ErrorCode::DomainError, "moment order must be >= 0");
    polys_.push_back({0, {Scalar(1)}});
    for (int k = 1; k <= max_order; ++k) polys_.push_back(solve_order(k));
  }

  explicit MomentLadder(const HopProbabilities& p, int max_order)
    requires std::floating_point<Scalar>
      : MomentLadder(static_cast<Scalar>(p.pr()), static_cast<Scalar>(p.pl()), max_order) {}

  int max_order() const { return static_cast<int>(polys_.size()) - 1; }

  const MomentPolynomial<Scalar>& polynomial(int k) const {
    if (k < 0 || k > max_order()) throw Error(ErrorCode::DomainError, "moment order out of range");
    return polys_[static_cast<std::size_t>(k)];
  }

  // max over x = 1..k+1 of |L[m_k](x) - R_k(x)|, relative to the size of the
  // terms being balanced.
  Scalar residual(int k) const { return residual_of(polynomial(k), k); }

 private:
  static Scalar binomial(int n, int r) {
    Scalar b = 1;
    for (int i = 1; i <= r; ++i) {
      b *= Scalar(n - r + i);
      b /= Scalar(i);
    }
    return b;
  }

  Scalar inhomogeneous(int k, const Scalar& x) const {
    Scalar acc = 0;
    for (int j = 0; j < k; ++j) {
      const Scalar term = binomial(k, j) * polys_[static_cast<std::size_t>(j)](x);
      acc += ((k - j) % 2 == 0) ? term : Scalar(-term);
    }
    return acc;
  }

  MomentPolynomial<Scalar> solve_order(int k) const {
    // Right-hand side coefficients r_d, d = 0..k-1.
    std::vector<Scalar> rhs(static_cast<std::size_t>(k), Scalar(0));
    for (int j = 0; j < k; ++j) {
      const Scalar w = ((k - j) % 2 == 0) ? binomial(k, j) : Scalar(-binomial(k, j));
      const auto& mj = polys_[static_cast<std::size_t>(j)].coeffs;
      for (std::size_t d = 0; d < mj.size(); ++d) rhs[d] += w * mj[d];
    }

    MomentPolynomial<Scalar> out{k, std::vector<Scalar>(static_cast<std::size_t>(k) + 1, Scalar(0))};
    auto& c = out.coeffs;
    // Coefficient of x^d in L[x^i] is C(i,d) (pr + pl (-1)^{i-d}) for d < i.
    for (int d = k - 1; d >= 0; --d) {
      Scalar acc = rhs[static_cast<std::size_t>(d)];
      for (int i = d + 2; i <= k; ++i) {
        const Scalar factor = ((i - d) % 2 == 0) ? Scalar(pr_ + pl_) : Scalar(pr_ - pl_);
        acc -= c[static_cast<std::size_t>(i)] * binomial(i, d) * factor;
      }
      c[static_cast<std::size_t>(d + 1)] = acc / (Scalar(d + 1) * (pr_ - pl_));
    }
    if constexpr (std::floating_point<Scalar>) {
      if (residual_of(out, k) > Scalar(1e-10)) {
        throw Error(ErrorCode::ParameterError,
                    "moment polynomial of order " + std::to_string(k) +
                        " failed its residual check; use exact rational parameters");
      }
    }
    return out;
  }

  static Scalar magnitude(const Scalar& v) { return v < 0 ? Scalar(-v) : v; }

  Scalar residual_of(const MomentPolynomial<Scalar>& m, int k) const {
    Scalar worst = 0;
    for (int xi = 1; xi <= k + 1; ++xi) {
      const Scalar x = xi;
      const Scalar lhs = pr_ * m(x + 1) - (pr_ + pl_) * m(x) + pl_ * m(x - 1);
      const Scalar rhs = inhomogeneous(k, x);
      Scalar scale = magnitude(rhs);
      const Scalar term_size = magnitude(Scalar(m(x) * (pl_ - pr_)));
      if (term_size > scale) scale = term_size;
      if (scale < 1) scale = 1;
      const Scalar rel = magnitude(Scalar(lhs - rhs)) / scale;
      if (rel > worst) worst = rel;
    }
    return worst;
  }

  Scalar pr_;
  Scalar pl_;
  std::vector<MomentPolynomial<Scalar>> polys_;
};

inline MomentPolynomial<double> moment_poly(int k, const HopProbabilities& p) {
  if (k < 1) throw Error(ErrorCode::DomainError, "moment order must be >= 1");
  return MomentLadder<double>(p, k).polynomial(k);
}

}  // namespace ruin
