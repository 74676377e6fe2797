// ruin_cli: first-hitting-time distribution of the lazy random walk.
//
//   ruin_cli pmf --x 1 --t 3 --pr 0.3 --pl 0.5 --pp 0.2 --method exact
//   ruin_cli figure2 --out data/
//   ruin_cli moments --x 5 --pr 0.3 --pl 0.5 --k 3
//   ruin_cli mgf --x 3 --s 0 --pr 0.4 --pl 0.2
//   ruin_cli validate --quick
//   ruin_cli simulate --x 1 --pr 0.3 --pl 0.5 --samples 100000 --seed 7

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ruin/cli.hpp"

namespace {

using ruin::cli::RunConfig;

void add_params(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--pr", cfg.pr, "probability of a step away from the origin")->required();
  cmd->add_option("--pl", cfg.pl, "probability of a step toward the origin")->required();
  cmd->add_option("--pp", cfg.pp, "halting probability (default 1 - pr - pl)");
}

void add_format(CLI::App* cmd, RunConfig& cfg) {
  const std::map<std::string, ruin::cli::Format> formats{{"csv", ruin::cli::Format::csv},
                                                         {"json", ruin::cli::Format::json}};
  cmd->add_option("--format", cfg.format, "csv or json")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
}

void add_mc(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "RNG seed");
  cmd->add_option("--samples", cfg.samples, "number of simulated walks")->check(CLI::PositiveNumber);
  cmd->add_option("--t-cap", cfg.t_cap, "censoring time for simulated walks")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", cfg.workers, "simulation threads (output does not depend on this)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-hitting-time distribution of the lazy random walk"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* pmf = app.add_subcommand("pmf", "P(x, t) table for one method");
  add_params(pmf, cfg);
  pmf->add_option("--x", cfg.x, "start position")->required();
  auto* t_opt = pmf->add_option("--t", cfg.t, "single time");
  auto* t_min = pmf->add_option("--t-min", cfg.t_min, "first time of a range");
  auto* t_max = pmf->add_option("--t-max", cfg.t_max, "last time of a range");
  pmf->add_option("--t-step", cfg.t_step, "range step")->check(CLI::PositiveNumber);
  t_opt->excludes(t_min)->excludes(t_max);
  t_min->needs(t_max);
  t_max->needs(t_min);
  std::string method = "exact";
  pmf->add_option("--method", method, "exact, hyp, dp, integral, mc or asymptotic")
      ->check(CLI::IsMember({"exact", "hyp", "dp", "integral", "mc", "asymptotic"}));
  add_format(pmf, cfg);
  pmf->add_option("--out", cfg.out, "output file (default stdout)");
  add_mc(pmf, cfg);

  auto* fig = app.add_subcommand("figure2", "long-time P(50, t) curves as CSV files");
  fig->add_option("--out", cfg.out, "output directory (default .)");
  fig->add_option("--t-min", cfg.t_min, "first time (default 50)");
  fig->add_option("--t-max", cfg.t_max, "last time (default 100000)");
  fig->add_option("--t-step", cfg.t_step, "uniform step instead of the default grid")
      ->check(CLI::PositiveNumber);

  auto* mom = app.add_subcommand("moments", "closed-form and polynomial moments of T_x");
  add_params(mom, cfg);
  mom->add_option("--x", cfg.x, "start position")->required();
  mom->add_option("--k", cfg.k, "highest moment order")->check(CLI::PositiveNumber);
  mom->add_option("--out", cfg.out, "output file (default stdout)");

  auto* gen = app.add_subcommand("mgf", "moment generating function M_x(s)");
  add_params(gen, cfg);
  gen->add_option("--x", cfg.x, "start position")->required();
  gen->add_option("--s", cfg.s, "argument s (<= s_max)")->required();
  gen->add_option("--out", cfg.out, "output file (default stdout)");

  auto* val = app.add_subcommand("validate", "cross-method agreement sweep");
  val->add_flag("--quick", cfg.quick, "small grid");
  auto& vc = cfg.validation;
  std::optional<ruin::StartPosition> v_x;
  std::optional<ruin::TimeIndex> v_t;
  std::optional<int> v_trials;
  std::optional<std::uint64_t> v_seed;
  std::optional<double> v_abs, v_rel, v_rec;
  val->add_option("--x-max", v_x, "largest start position");
  val->add_option("--t-max", v_t, "largest time");
  val->add_option("--trials", v_trials, "number of random parameter triples");
  val->add_option("--seed", v_seed, "seed for the parameter draw");
  val->add_option("--abs-tol", v_abs, "tolerance for exact vs dp and exact vs integral");
  val->add_option("--rel-tol", v_rel, "relative tolerance for exact vs hyp");
  val->add_option("--recursion-tol", v_rec, "tolerance for the difference-equation residual");
  val->add_option("--out", cfg.out, "output file (default stdout)");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo histogram of hitting times");
  add_params(sim, cfg);
  sim->add_option("--x", cfg.x, "start position")->required();
  add_mc(sim, cfg);
  add_format(sim, cfg);
  sim->add_option("--out", cfg.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << ruin::cli::error_json("UsageError", e.what()) << '\n';
    return ruin::cli::kUsage;
  }

  if (*pmf) {
    cfg.subcommand = ruin::cli::Subcommand::pmf;
    cfg.method = *ruin::parse_method(method);
  } else if (*fig) {
    cfg.subcommand = ruin::cli::Subcommand::figure2;
  } else if (*mom) {
    cfg.subcommand = ruin::cli::Subcommand::moments;
  } else if (*gen) {
    cfg.subcommand = ruin::cli::Subcommand::mgf;
  } else if (*val) {
    cfg.subcommand = ruin::cli::Subcommand::validate;
    if (cfg.quick) vc = ruin::ValidationConfig::quick();
    if (v_x) vc.x_max = *v_x;
    if (v_t) vc.t_max = *v_t;
    if (v_trials) vc.trials = *v_trials;
    if (v_seed) vc.seed = *v_seed;
    if (v_abs) vc.abs_tol = *v_abs;
    if (v_rel) vc.rel_tol = *v_rel;
    if (v_rec) vc.recursion_tol = *v_rec;
  } else if (*sim) {
    cfg.subcommand = ruin::cli::Subcommand::simulate;
  }
  return ruin::cli::run(cfg, std::cout, std::cerr);
}
