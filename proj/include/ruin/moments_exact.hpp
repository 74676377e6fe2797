#pragma once

// Exact rational mode for the moment polynomials. Coefficients carry
// (pl - pr)^{-(2k-1)}, so floating point loses digits as pl - pr -> 0.

#include <boost/multiprecision/cpp_int.hpp>

#include "ruin/moments.hpp"

namespace ruin {

using Rational = boost::multiprecision::cpp_rational;
using ExactMomentLadder = MomentLadder<Rational>;

inline MomentPolynomial<Rational> moment_poly_exact(int k, const Rational& pr, const Rational& pl) {
  if (k < 1) throw Error(ErrorCode::DomainError, "moment order must be >= 1");
  return ExactMomentLadder(pr, pl, k).polynomial(k);
}

}  // namespace ruin
