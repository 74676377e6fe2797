#pragma once

// Cross-method agreement sweep: the closed-form sum against the recursion
// grid, the hypergeometric form and the quadrature route, plus the
// first-step recursion residual of the closed form itself.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ruin/core.hpp"
#include "ruin/exact.hpp"
#include "ruin/oracles.hpp"

namespace ruin {

struct ValidationConfig {
  StartPosition x_max = 30;
  TimeIndex t_max = 200;
  int trials = 25;
  std::uint64_t seed = 20240601;
  double abs_tol = 1e-10;        // exact vs dp, exact vs integral
  double rel_tol = 1e-9;         // exact vs hypergeometric
  double recursion_tol = 1e-12;  // difference-equation residual
  double rel_floor = 1e-280;     // relative checks only above this value

  static ValidationConfig quick() {
    ValidationConfig c;
    c.x_max = 10;
    c.t_max = 60;
    c.trials = 5;
    return c;
  }
};

struct Discrepancy {
  std::string pair;
  bool relative = false;
  double tolerance = 0.0;
  double worst = 0.0;
  StartPosition x = 0;
  TimeIndex t = 0;
  double pr = 0.0, pl = 0.0, pp = 0.0;
  std::size_t checked = 0;

  bool passed() const { return worst <= tolerance; }

  void record(double err, StartPosition xi, TimeIndex ti, const HopProbabilities& p) {
    ++checked;
    if (err > worst || std::isnan(err)) {
      worst = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
      x = xi;
      t = ti;
      pr = p.pr();
      pl = p.pl();
      pp = p.pp();
    }
  }
};

struct ValidationReport {
  std::vector<Discrepancy> pairs;

  bool passed() const {
    return std::all_of(pairs.begin(), pairs.end(), [](const Discrepancy& d) { return d.passed(); });
  }
};

// Uniform draw from the probability simplex (normalized exponentials).
inline HopProbabilities random_simplex_point(SubstreamRng& rng) {
  double e[3];
  for (double& v : e) v = -std::log1p(-rng.uniform());
  const double total = e[0] + e[1] + e[2];
  const double pr = e[0] / total;
  const double pl = e[1] / total;
  return HopProbabilities::make(pr, pl, std::max(0.0, 1.0 - pr - pl));
}

inline std::vector<HopProbabilities> random_parameter_set(int n, std::uint64_t seed) {
  SubstreamRng rng(seed, 0);
  std::vector<HopProbabilities> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(random_simplex_point(rng));
  return out;
}

inline ValidationReport cross_validate(const ValidationConfig& cfg) {
  Discrepancy vs_dp{"exact-dp", false, cfg.abs_tol};
  Discrepancy vs_hyp{"exact-hyp", true, cfg.rel_tol};
  Discrepancy vs_int{"exact-integral", false, cfg.abs_tol};
  Discrepancy recursion{"exact-recursion", false, cfg.recursion_tol};

  const LogFactorialTable lf(cfg.t_max + 1);
  for (const HopProbabilities& p : random_parameter_set(cfg.trials, cfg.seed)) {
    const DpGrid grid = dp_grid(cfg.x_max + 1, cfg.t_max + 1, p);
    // exact[x][t] for x in 0..x_max+1, t in 0..t_max+1
    std::vector<std::vector<double>> exact(static_cast<std::size_t>(cfg.x_max) + 2);
    for (StartPosition x = 0; x <= cfg.x_max + 1; ++x) {
      auto& row = exact[static_cast<std::size_t>(x)];
      row.resize(static_cast<std::size_t>(cfg.t_max) + 2);
      for (TimeIndex t = 0; t <= cfg.t_max + 1; ++t) row[static_cast<std::size_t>(t)] = pmf(x, t, p, lf).value;
    }
    auto E = [&](StartPosition x, TimeIndex t) {
      return exact[static_cast<std::size_t>(x)][static_cast<std::size_t>(t)];
    };

    for (StartPosition x = 1; x <= cfg.x_max; ++x) {
      for (TimeIndex t = x; t <= cfg.t_max; ++t) {
        const double e = E(x, t);
        vs_dp.record(std::abs(grid.at(x, t) - e), x, t, p);
        if (p.pp() > 0.0 && e > cfg.rel_floor) {
          vs_hyp.record(std::abs(pmf_via_2f1(x, t, p).value - e) / e, x, t, p);
        }
        if (p.pr() > 0.0 && p.pl() > 0.0) {
          vs_int.record(std::abs(pmf_integral(x, t, p).value - e), x, t, p);
        }
        const double rhs = p.pr() * E(x + 1, t) + p.pl() * E(x - 1, t) + p.pp() * E(x, t);
        recursion.record(std::abs(E(x, t + 1) - rhs), x, t, p);
      }
    }
  }
  return {{vs_dp, vs_hyp, vs_int, recursion}};
}

}  // namespace ruin
