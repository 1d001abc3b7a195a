// Command-line entry point. Exit codes: 0 success, 1 failed verdict or
// aborted computation, 2 bad flags. Worker count comes from PERCAP_THREADS.
#include "percap/condition_g.hpp"
#include "percap/overlap_exponents.hpp"
#include "percap/replica_saddle.hpp"
#include "percap/reporting.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>

using namespace percap;

namespace {

// Writes to --out when given, else to stdout.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty())
    std::cout << text;
  else
    write_text_file(cfg.out, text);
}

std::string fmt11(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11f", x);
  return buf;
}

int cmd_fixed_point(const RunConfig& cfg) {
  const SaddlePoint sp = solve_saddle({cfg.kappa, cfg.alpha});
  if (cfg.format == "json") {
    if (!cfg.out.empty()) write_text_file(cfg.out, dump_json(fixed_point_json(sp, cfg)));
  }
  std::cout << "alpha     " << fmt11(sp.alpha) << '\n'
            << "kappa     " << fmt11(sp.kappa) << '\n'
            << "q_star    " << fmt11(sp.q_star) << '\n'
            << "psi_star  " << fmt11(sp.psi_star) << '\n'
            << "at_slope  " << fmt11(sp.at_slope) << '\n'
            << "G_star    " << fmt11(sp.g_star) << '\n'
            << "H_star    " << fmt11(h_star(sp)) << '\n'
            << "P_star    " << fmt11(p_star(sp)) << '\n';
  if (cfg.format == "csv" && !cfg.out.empty()) {
    CsvTable t;
    t.context = context_line(sp);
    t.columns = {"alpha", "kappa", "q_star", "psi_star", "at_slope", "G_star", "H_star", "P_star"};
    t.rows.push_back({sp.alpha, sp.kappa, sp.q_star, sp.psi_star, sp.at_slope, sp.g_star, h_star(sp), p_star(sp)});
    write_text_file(cfg.out, t.str());
  }
  return 0;
}

int cmd_curves(const RunConfig& cfg) {
  const SaddlePoint sp = solve_saddle({cfg.kappa, cfg.alpha});
  const CsvTable t = curve_table(cfg.curve, sp, cfg.npoints);
  if (cfg.format == "json") {
    nlohmann::json j{{"version", kReportVersion}, {"config", cfg.to_json()}, {"context", t.context}, {"columns", t.columns}, {"rows", t.rows}};
    emit(cfg, dump_json(j));
  } else {
    emit(cfg, t.str());
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  static const std::map<std::string, std::vector<Part>> parts{
      {"all", {Part::Constants, Part::AValue, Part::BFirstDeriv, Part::CSecondDeriv, Part::NearOne}},
      {"constants", {Part::Constants}},
      {"a", {Part::AValue}},
      {"b", {Part::BFirstDeriv}},
      {"c", {Part::CSecondDeriv}},
      {"near_one", {Part::NearOne}}};
  VerifierOptions opt;
  opt.refine = cfg.refine;
  opt.parts = parts.at(cfg.part);
  opt.workers = cfg.workers;
  const VerificationReport rep = verify_condition_g(opt);
  emit(cfg, dump_json(verification_json(rep, cfg)));
  std::size_t passed = 0;
  for (const auto& c : rep.cells) passed += c.pass;
  std::cerr << "cells " << passed << "/" << rep.cells.size() << " passed, verdict " << (rep.verdict ? "true" : "false") << '\n';
  return rep.verdict ? 0 : 1;
}

int cmd_tap(const RunConfig& cfg) {
  const SaddlePoint sp = solve_saddle({cfg.kappa, cfg.alpha});
  const auto runs = run_tap_seeds(cfg, sp);
  const auto j = tap_json(runs, sp, cfg);
  emit(cfg, dump_json(j));
  std::cerr << "mean |q_t - q*| = " << format_double(j["summary"]["mean_abs_q_t_minus_q_star"].get<double>()) << '\n';
  return 0;
}

int cmd_kimroche(const RunConfig& cfg) {
  const SaddlePoint sp = solve_saddle({cfg.kappa, cfg.alpha});
  const auto trials = run_kim_roche_trials(cfg, sp);
  const auto j = kim_roche_json(trials, cfg);
  emit(cfg, dump_json(j));
  std::cerr << "success fraction " << format_double(j["success_fraction"].get<double>()) << '\n';
  return 0;
}

int cmd_brute(const RunConfig& cfg) {
  const auto runs = run_brute_trials(cfg);
  if (cfg.format == "csv")
    emit(cfg, brute_histogram(runs, cfg).str());
  else
    emit(cfg, dump_json(brute_json(runs, cfg)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ising perceptron capacity: saddle solver, condition verifier, simulations"};
  app.set_version_flag("--version", kReportVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--alpha", cfg.alpha, "constraint density M/N")->check(CLI::PositiveNumber);
    sub->add_option("--kappa", cfg.kappa, "margin");
    sub->add_option("--out", cfg.out, "output file (stdout when omitted)");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* fp = app.add_subcommand("fixed-point", "solve the replica-symmetric saddle");
  auto* cv = app.add_subcommand("curves", "figure data tables");
  cv->add_option("which", cfg.curve, "qrecursion, ell, H, P, B or HPA")->required()->check(CLI::IsMember({"qrecursion", "ell", "H", "P", "B", "HPA"}));
  cv->add_option("--npoints", cfg.npoints, "grid points")->check(CLI::Range(2, 1000000));
  auto* vf = app.add_subcommand("verify", "certify S(lambda) < 0 away from {0, 1}");
  vf->add_option("--part", cfg.part, "all, constants, a, b, c or near_one")->check(CLI::IsMember({"all", "constants", "a", "b", "c", "near_one"}));
  vf->add_option("--refine", cfg.refine, "subdivide every cell k-fold")->check(CLI::Range(1, 64));
  auto* tp = app.add_subcommand("tap", "TAP iteration on random instances");
  tp->add_option("--n", cfg.n, "N")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  tp->add_option("--t", cfg.t, "iterations")->check(CLI::Range(1, 100000));
  tp->add_option("--seeds", cfg.seeds, "number of seeds")->check(CLI::Range(1, 1000000));
  tp->add_option("--seed", cfg.seed, "first seed");
  auto* kr = app.add_subcommand("kimroche", "staged rounding of reserved columns");
  kr->add_option("--m", cfg.m, "M")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  kr->add_option("--delta", cfg.delta, "slack")->check(CLI::Range(1e-6, 1.0 - 1e-6));
  kr->add_option("--trials", cfg.trials, "trials")->check(CLI::Range(1, 1000000));
  kr->add_option("--t", cfg.t, "TAP iterations before rounding")->check(CLI::Range(1, 100000));
  kr->add_option("--seed", cfg.seed, "first seed");
  auto* bf = app.add_subcommand("brute", "exhaustive capacity M_N at small N");
  bf->add_option("--n", cfg.n, "N")->check(CLI::Range(std::size_t{1}, kMaxBruteN));
  bf->add_option("--trials", cfg.trials, "instances")->check(CLI::Range(1, 1000000));
  bf->add_option("--m-max", cfg.m_max, "censoring cap on M")->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
  bf->add_option("--seed", cfg.seed, "first seed");

  // Defaults that differ between subcommands are set before parsing.
  const std::string first = argc > 1 ? argv[1] : "";
  if (first == "curves") cfg.format = "csv";
  if (first == "brute") {
    cfg.n = 20;
    cfg.trials = 200;
    cfg.format = "csv";
  }
  if (first == "kimroche") cfg.t = 15;
  for (auto* sub : {fp, cv, vf, tp, kr, bf}) common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::vector<std::pair<CLI::App*, int (*)(const RunConfig&)>> commands{
      {fp, cmd_fixed_point}, {cv, cmd_curves}, {vf, cmd_verify}, {tp, cmd_tap}, {kr, cmd_kimroche}, {bf, cmd_brute}};
  for (const auto& [sub, run] : commands) {
    if (!*sub) continue;
    cfg.subcommand = sub->get_name();
    try {
      return run(cfg);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}
