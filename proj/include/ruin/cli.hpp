#pragma once

// Command implementations behind the ruin_cli executable. Each command takes
// a parsed RunConfig, writes its table or report to `out`, and returns the
// process exit code. Flag parsing lives in tools/ruin_cli.cpp.

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ruin/asymptotics.hpp"
#include "ruin/core.hpp"
#include "ruin/exact.hpp"
#include "ruin/moments.hpp"
#include "ruin/oracles.hpp"
#include "ruin/report.hpp"
#include "ruin/validate.hpp"

namespace ruin::cli {

enum class Subcommand { pmf, figure2, moments, mgf, validate, simulate };
enum class Format { csv, json };

// Exit codes. Module errors map one-to-one onto ErrorCode.
enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kUsage = 2,
  kNegativeProbability = 3,
  kSimplexViolation = 4,
  kNonTerminatingSeries = 5,
  kDomainError = 6,
  kParameterError = 7,
  kCapacityError = 8,
  kDivergentMoment = 9,
  kIoError = 10,
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeProbability: return kNegativeProbability;
    case ErrorCode::SimplexViolation: return kSimplexViolation;
    case ErrorCode::NonTerminatingSeries: return kNonTerminatingSeries;
    case ErrorCode::DomainError: return kDomainError;
    case ErrorCode::ParameterError: return kParameterError;
    case ErrorCode::CapacityError: return kCapacityError;
    case ErrorCode::DivergentMoment: return kDivergentMoment;
  }
  return kDomainError;
}

struct RunConfig {
  Subcommand subcommand = Subcommand::pmf;
  std::optional<double> pr, pl, pp;
  StartPosition x = 1;
  std::optional<TimeIndex> t;
  std::optional<TimeIndex> t_min, t_max;
  TimeIndex t_step = 1;
  Method method = Method::closed_form;
  Format format = Format::csv;
  std::string out;  // empty: stdout (figure2: output directory, default ".")
  std::uint64_t seed = 1;
  std::uint64_t samples = 1'000'000;
  TimeIndex t_cap = 10'000;
  unsigned workers = 1;
  int k = 3;
  double s = 0.0;
  bool quick = false;
  ValidationConfig validation;

  // Strict parameters; pp inferred when omitted.
  HopProbabilities params() const {
    if (!pr || !pl) throw Error(ErrorCode::ParameterError, "--pr and --pl are required");
    if (!pp) return HopProbabilities::with_inferred_halt(*pr, *pl);
    return HopProbabilities::make(*pr, *pl, *pp);
  }

  std::vector<TimeIndex> times() const {
    if (t && (t_min || t_max)) {
      throw Error(ErrorCode::ParameterError, "--t cannot be combined with --t-min/--t-max");
    }
    if (t) {
      if (*t < 0) throw Error(ErrorCode::DomainError, "--t must be >= 0");
      return {*t};
    }
    if (!t_min || !t_max) throw Error(ErrorCode::ParameterError, "give --t or both --t-min and --t-max");
    if (*t_min < 0 || *t_max < *t_min) throw Error(ErrorCode::DomainError, "need 0 <= t-min <= t-max");
    if (t_step < 1) throw Error(ErrorCode::DomainError, "--t-step must be >= 1");
    std::vector<TimeIndex> ts;
    for (TimeIndex v = *t_min; v <= *t_max; v += t_step) ts.push_back(v);
    return ts;
  }
};

inline std::string error_json(std::string_view code, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = std::string(code);
  j["message"] = std::string(message);
  return j.dump();
}

namespace detail {

// Runs `body` against the --out file, or `fallback` when --out is empty.
template <typename Body>
void with_output(const std::string& path, std::ostream& fallback, Body&& body) {
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::ios_base::failure("cannot open " + path);
  body(file);
}

inline nlohmann::ordered_json discrepancy_json(const Discrepancy& d) {
  nlohmann::ordered_json j;
  j["pair"] = d.pair;
  j["kind"] = d.relative ? "relative" : "absolute";
  j["max"] = d.worst;
  j["tolerance"] = d.tolerance;
  j["checked"] = d.checked;
  j["passed"] = d.passed();
  j["at"] = {{"x", d.x}, {"t", d.t}, {"pr", d.pr}, {"pl", d.pl}, {"pp", d.pp}};
  return j;
}

}  // namespace detail

inline int cmd_pmf(const RunConfig& cfg, std::ostream& out) {
  const PmfTable table =
      pmf_table(cfg.x, cfg.times(), cfg.params(), cfg.method,
                MonteCarloOptions{cfg.samples, cfg.seed, cfg.t_cap, cfg.workers});
  detail::with_output(cfg.out, out, [&](std::ostream& os) {
    if (cfg.format == Format::json) {
      write_json(os, table);
    } else {
      write_csv(os, table);
    }
  });
  return kOk;
}

// Writes figure2_<panel>_pr<pr>.csv (t,p) per curve, figure2_d_pr<pr>.csv
// (ln_t,ln_p) for the dp = 0 curves, and prints one summary line per curve.
inline int cmd_figure2(const RunConfig& cfg, std::ostream& out) {
  Figure2Grid grid;
  if (cfg.t_min) grid.t_min = *cfg.t_min;
  if (cfg.t_max) grid.t_max = *cfg.t_max;
  if (cfg.t_step > 1) grid.step = cfg.t_step;
  const std::filesystem::path dir = cfg.out.empty() ? "." : cfg.out;
  std::filesystem::create_directories(dir);

  const auto curves = figure2_curves(grid, 50);
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (const Figure2Curve& c : curves) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "pr%.1f", c.params.pr());
    const std::string stem = std::string("figure2_") + c.panel + "_" + tag;
    {
      std::ofstream f(dir / (stem + ".csv"), std::ios::binary);
      if (!f) throw std::ios_base::failure("cannot write " + (dir / (stem + ".csv")).string());
      write_curve_csv(f, c);
    }
    if (c.delta_p == 0.0) {
      const std::string d_name = std::string("figure2_d_") + tag + ".csv";
      std::ofstream f(dir / d_name, std::ios::binary);
      if (!f) throw std::ios_base::failure("cannot write " + (dir / d_name).string());
      write_curve_loglog_csv(f, c);
    }
    CompensatedSum<double> mass;
    for (double v : c.p) mass += v;
    summary.push_back({{"panel", std::string(1, c.panel)},
                       {"pr", c.params.pr()},
                       {"pl", c.params.pl()},
                       {"pp", c.params.pp()},
                       {"points", c.t.size()},
                       {"unimodal", is_unimodal(c.p)},
                       {"sampled_mass", mass.value()}});
  }
  out << summary.dump(2) << '\n';
  return kOk;
}

inline int cmd_moments(const RunConfig& cfg, std::ostream& out) {
  const HopProbabilities p = cfg.params();
  if (cfg.k < 1) throw Error(ErrorCode::DomainError, "--k must be >= 1");
  const MomentLadder<double> ladder(p, cfg.k);
  const double x = static_cast<double>(cfg.x);
  nlohmann::ordered_json j;
  j["params"] = params_json(p);
  j["x"] = cfg.x;
  j["mean"] = mean(cfg.x, p);
  j["variance"] = variance(cfg.x, p);
  j["second_moment"] = second_moment(cfg.x, p);
  j["third_moment"] = third_moment(cfg.x, p);
  auto ladder_json = nlohmann::ordered_json::array();
  for (int k = 1; k <= cfg.k; ++k) {
    const auto& poly = ladder.polynomial(k);
    ladder_json.push_back({{"k", k}, {"moment", poly(x)}, {"coefficients", poly.coeffs}});
  }
  j["moment_poly"] = std::move(ladder_json);
  detail::with_output(cfg.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

inline int cmd_mgf(const RunConfig& cfg, std::ostream& out) {
  const HopProbabilities p = cfg.params();
  const MgfValue m = mgf(cfg.x, cfg.s, p);
  nlohmann::ordered_json j;
  j["params"] = params_json(p);
  j["x"] = cfg.x;
  j["s"] = m.s;
  j["mgf"] = m.value;
  j["s_max"] = m.s_max;
  detail::with_output(cfg.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

// Prints the per-pair report on `out`; on failure also lists the offending
// points on `err` and returns kValidationFailed.
inline int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ValidationReport report = cross_validate(cfg.validation);
  nlohmann::ordered_json j;
  j["x_max"] = cfg.validation.x_max;
  j["t_max"] = cfg.validation.t_max;
  j["trials"] = cfg.validation.trials;
  j["seed"] = cfg.validation.seed;
  auto pairs = nlohmann::ordered_json::array();
  for (const Discrepancy& d : report.pairs) pairs.push_back(detail::discrepancy_json(d));
  j["pairs"] = pairs;
  j["passed"] = report.passed();
  detail::with_output(cfg.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (report.passed()) return kOk;
  nlohmann::ordered_json e;
  e["error"] = "ValidationFailed";
  e["message"] = "cross-method discrepancy above tolerance";
  auto failing = nlohmann::ordered_json::array();
  for (const Discrepancy& d : report.pairs) {
    if (!d.passed()) failing.push_back(detail::discrepancy_json(d));
  }
  e["failures"] = failing;
  err << e.dump() << '\n';
  return kValidationFailed;
}

inline void write_histogram_csv(std::ostream& os, const EmpiricalPmf& h) {
  os << "t,count\n";
  for (std::size_t t = 0; t < h.counts.size(); ++t) {
    if (h.counts[t] != 0) os << t << ',' << h.counts[t] << '\n';
  }
}

inline void write_histogram_json(std::ostream& os, const EmpiricalPmf& h) {
  nlohmann::ordered_json j;
  j["params"] = params_json(h.params);
  j["x"] = h.x;
  j["n_samples"] = h.n_samples;
  j["seed"] = h.seed;
  j["rng_algorithm"] = h.rng_algorithm;
  j["t_cap"] = h.t_cap;
  j["censored"] = h.censored;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < h.counts.size(); ++t) {
    if (h.counts[t] != 0) rows.push_back({{"t", t}, {"count", h.counts[t]}});
  }
  j["rows"] = std::move(rows);
  os << j.dump(2) << '\n';
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const EmpiricalPmf h = empirical_pmf(cfg.x, cfg.params(), cfg.samples, cfg.t_cap, cfg.seed, cfg.workers);
  detail::with_output(cfg.out, out, [&](std::ostream& os) {
    if (cfg.format == Format::json) {
      write_histogram_json(os, h);
    } else {
      write_histogram_csv(os, h);
    }
  });
  return kOk;
}

// Dispatches and converts every failure into an error JSON line on `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.subcommand) {
      case Subcommand::pmf: return cmd_pmf(cfg, out);
      case Subcommand::figure2: return cmd_figure2(cfg, out);
      case Subcommand::moments: return cmd_moments(cfg, out);
      case Subcommand::mgf: return cmd_mgf(cfg, out);
      case Subcommand::validate: return cmd_validate(cfg, out, err);
      case Subcommand::simulate: return cmd_simulate(cfg, out);
    }
  } catch (const Error& e) {
    err << error_json(to_string(e.code()), e.what()) << '\n';
    return exit_code_for(e.code());
  } catch (const std::ios_base::failure& e) {
    err << error_json("IoError", e.what()) << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << error_json("IoError", e.what()) << '\n';
    return kIoError;
  }
  return kUsage;
}

}  // namespace ruin::cli
