#pragma once

// Tabular output (CSV / JSON) and the data series behind the long-time
// P(x, t) curves at x = 50.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ruin/asymptotics.hpp"
#include "ruin/core.hpp"
#include "ruin/exact.hpp"
#include "ruin/oracles.hpp"

namespace ruin {

// 17 significant digits: enough for a lossless double round trip.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct PmfRow {
  TimeIndex t = 0;
  double p = 0.0;
};

struct PmfTable {
  HopProbabilities params;
  StartPosition x = 0;
  Method method = Method::closed_form;
  std::vector<PmfRow> rows;
};

inline void write_csv(std::ostream& os, const PmfTable& table) {
  os << "t,p\n";
  for (const PmfRow& r : table.rows) os << r.t << ',' << format_real(r.p) << '\n';
}

inline nlohmann::ordered_json params_json(const HopProbabilities& p) {
  return {{"pr", p.pr()}, {"pl", p.pl()}, {"pp", p.pp()}};
}

inline void write_json(std::ostream& os, const PmfTable& table) {
  nlohmann::ordered_json doc;
  doc["params"] = params_json(table.params);
  doc["x"] = table.x;
  doc["method"] = std::string(to_string(table.method));
  auto rows = nlohmann::ordered_json::array();
  for (const PmfRow& r : table.rows) rows.push_back({{"t", r.t}, {"p", r.p}});
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::closed_form, Method::hypergeometric, Method::dp, Method::integral,
                   Method::monte_carlo, Method::asymptotic}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

struct MonteCarloOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  TimeIndex t_cap = 10'000;
  unsigned workers = 1;
};

// P(x, t) for every t in ts (ascending) by the chosen method.
inline PmfTable pmf_table(StartPosition x, const std::vector<TimeIndex>& ts, const HopProbabilities& p,
                          Method method, const MonteCarloOptions& mc = {}) {
  PmfTable table{p, x, method, {}};
  if (ts.empty()) return table;
  const TimeIndex t_max = *std::max_element(ts.begin(), ts.end());
  table.rows.reserve(ts.size());
  switch (method) {
    case Method::closed_form: {
      const LogFactorialTable lf(std::max<TimeIndex>(t_max, 1));
      for (TimeIndex t : ts) table.rows.push_back({t, pmf(x, t, p, lf).value});
      break;
    }
    case Method::hypergeometric:
      for (TimeIndex t : ts) table.rows.push_back({t, pmf_via_2f1(x, t, p).value});
      break;
    case Method::dp: {
      const DpGrid grid = dp_grid(std::max<StartPosition>(x, 1), t_max, p);
      for (TimeIndex t : ts) table.rows.push_back({t, grid.at(x, t)});
      break;
    }
    case Method::integral:
      for (TimeIndex t : ts) {
        const double v = (x == 0 || t == 0) ? pmf(x, t, p).value : pmf_integral(x, t, p).value;
        table.rows.push_back({t, v});
      }
      break;
    case Method::monte_carlo: {
      const EmpiricalPmf emp =
          empirical_pmf(x, p, mc.samples, std::max(mc.t_cap, t_max), mc.seed, mc.workers);
      for (TimeIndex t : ts) table.rows.push_back({t, emp.frequency(t)});
      break;
    }
    case Method::asymptotic:
      for (TimeIndex t : ts) table.rows.push_back({t, asymptotic_pmf(x, t, p).value});
      break;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Long-time curves at x = 50
// ---------------------------------------------------------------------------

struct Figure2Curve {
  char panel = 'a';  // a: dp = 0.2, b: dp = 0.1, c: dp = 0 (d is c on log scales)
  double delta_p = 0.0;
  HopProbabilities params;
  StartPosition x = 50;
  std::vector<TimeIndex> t;
  std::vector<double> p;
  std::vector<double> log_p;
};

struct Figure2Grid {
  TimeIndex t_min = 50;
  TimeIndex t_max = 100'000;
  // Every t up to dense_until, then points_per_decade geometric steps.
  TimeIndex dense_until = 2'000;
  int points_per_decade = 100;
  // When > 0, a uniform grid t_min, t_min + step, ... replaces the above.
  TimeIndex step = 0;
};

inline std::vector<TimeIndex> figure2_times(const Figure2Grid& g) {
  if (g.t_min < 1 || g.t_max < g.t_min) throw Error(ErrorCode::DomainError, "invalid time grid");
  std::vector<TimeIndex> ts;
  if (g.step > 0) {
    for (TimeIndex t = g.t_min; t <= g.t_max; t += g.step) ts.push_back(t);
    return ts;
  }
  const TimeIndex dense_end = std::min(g.dense_until, g.t_max);
  for (TimeIndex t = g.t_min; t <= dense_end; ++t) ts.push_back(t);
  const double ratio = std::pow(10.0, 1.0 / std::max(1, g.points_per_decade));
  double next = static_cast<double>(std::max(dense_end, g.t_min));
  while (true) {
    next *= ratio;
    auto t = static_cast<TimeIndex>(std::llround(next));
    if (t > g.t_max) break;
    if (ts.empty() || t > ts.back()) ts.push_back(t);
  }
  if (ts.back() != g.t_max) ts.push_back(g.t_max);
  return ts;
}

// Six curves: dp in {0.2, 0.1, 0} with pr in {0.1, 0.3} and pl = pr + dp.
inline std::vector<Figure2Curve> figure2_curves(const Figure2Grid& grid = {}, StartPosition x = 50) {
  const std::vector<TimeIndex> ts = figure2_times(grid);
  const LogFactorialTable lf(ts.back());
  std::vector<Figure2Curve> curves;
  const std::pair<char, double> panels[] = {{'a', 0.2}, {'b', 0.1}, {'c', 0.0}};
  for (const auto& [panel, dp] : panels) {
    for (double pr : {0.1, 0.3}) {
      const double pl = pr + dp;
      Figure2Curve c{panel, dp, HopProbabilities::make(pr, pl, 1.0 - pr - pl), x, ts, {}, {}};
      c.p.reserve(ts.size());
      c.log_p.reserve(ts.size());
      for (TimeIndex t : ts) {
        const PmfValue v = pmf(x, t, c.params, lf);
        c.p.push_back(v.value);
        c.log_p.push_back(v.log_value);
      }
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

// Non-decreasing up to the maximum, non-increasing after it.
inline bool is_unimodal(std::span<const double> values) {
  if (values.empty()) return true;
  const auto peak = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
  for (std::size_t i = 1; i <= peak; ++i) {
    if (values[i] < values[i - 1]) return false;
  }
  for (std::size_t i = peak + 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1]) return false;
  }
  return true;
}

inline void write_curve_csv(std::ostream& os, const Figure2Curve& c) {
  os << "t,p\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) os << c.t[i] << ',' << format_real(c.p[i]) << '\n';
}

// Log-log view of a curve: ln t, ln P (from the log-space value, so no underflow).
inline void write_curve_loglog_csv(std::ostream& os, const Figure2Curve& c) {
  os << "ln_t,ln_p\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    os << format_real(std::log(static_cast<double>(c.t[i]))) << ',' << format_real(c.log_p[i]) << '\n';
  }
}

// OLS slope of ln P against ln t (log_log = true) or against t, over t in [lo, hi].
inline double curve_slope(const Figure2Curve& c, TimeIndex lo, TimeIndex hi, bool log_log) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    if (c.t[i] < lo || c.t[i] > hi) continue;
    const double td = static_cast<double>(c.t[i]);
    xs.push_back(log_log ? std::log(td) : td);
    ys.push_back(c.log_p[i]);
  }
  return least_squares(xs, ys).slope;
}

}  // namespace ruin
