#include "percap/reporting.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace percap;

namespace {
const SaddlePoint& saddle() {
  static const SaddlePoint sp = solve_saddle({0.0, 0.833});
  return sp;
}
}  // namespace

TEST_CASE("numbers print with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
}

TEST_CASE("CSV layout") {
  CsvTable t;
  t.context = "alpha=1";
  t.columns = {"x", "y"};
  t.rows = {{1.0, 0.5}, {2.0, -0.25}};
  CHECK(t.str() == "# alpha=1\nx,y\n1,0.5\n2,-0.25\n");
}

TEST_CASE("run configuration round-trips through its JSON form") {
  RunConfig c;
  c.subcommand = "verify";
  c.alpha = 0.8330786;
  c.kappa = 0.1;
  c.part = "b";
  c.refine = 3;
  c.curve = "HPA";
  c.npoints = 17;
  c.seed = 12345678901234ULL;
  c.seeds = 3;
  c.trials = 4;
  c.n = 21;
  c.m = 99;
  c.t = 7;
  c.delta = 0.25;
  c.m_max = 40;
  c.out = "x.json";
  c.format = "csv";
  const RunConfig back = RunConfig::from_json(nlohmann::json::parse(dump_json(c.to_json())));
  CHECK(back.to_json() == c.to_json());
  CHECK(back.seed == c.seed);
  CHECK(back.alpha == c.alpha);
}

TEST_CASE("curve names") {
  for (const char* n : {"qrecursion", "ell", "H", "P", "B", "HPA"}) CHECK(is_curve_name(n));
  CHECK_FALSE(is_curve_name("S"));
  CHECK_THROWS_AS(curve_table("S", saddle(), 11), std::invalid_argument);
}

TEST_CASE("ell curve end points") {
  const CsvTable t = curve_table("ell", saddle(), 21);
  REQUIRE(t.rows.size() == 21);
  CHECK(t.columns == std::vector<std::string>{"tau", "lambda"});
  CHECK(t.rows.front()[0] == -1.0);
  CHECK(t.rows.front()[1] == doctest::Approx(-0.424).epsilon(0.002 / 0.424));
  CHECK(t.rows.back()[0] == 1.0);
  CHECK(t.rows.back()[1] == doctest::Approx(1.0));
  CHECK(t.context.find("q_star=") != std::string::npos);
}

TEST_CASE("q recursion crosses the diagonal once near q_*") {
  const CsvTable t = curve_table("qrecursion", saddle(), 199);
  int crossings = 0;
  double where = 0.0;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const double a = t.rows[i - 1][1] - t.rows[i - 1][0], b = t.rows[i][1] - t.rows[i][0];
    if ((a > 0) != (b > 0)) {
      ++crossings;
      where = t.rows[i][0];
    }
  }
  CHECK(crossings == 1);
  CHECK(std::abs(where - saddle().q_star) < 0.01);
}

TEST_CASE("exponent curves at the end points") {
  const SaddlePoint sp = solve_saddle({0.0, 0.8330785995});
  const CsvTable hpa = curve_table("HPA", sp, 11);
  CHECK(hpa.columns.size() == 3);
  CHECK(hpa.rows.back()[0] == 1.0);
  CHECK(std::abs(hpa.rows.back()[1] + sp.g_star) < 1e-10);
  CHECK(std::abs(hpa.rows.back()[1]) < 1e-8);
  const CsvTable b = curve_table("B", sp, 11);
  CHECK(b.columns == std::vector<std::string>{"lambda", "s", "B"});
  CHECK(b.rows.back()[2] == doctest::Approx(0.5 * 0.09));
  const CsvTable h = curve_table("H", sp, 11);
  CHECK(h.rows.back()[1] == doctest::Approx(-h_star(sp)));
}

TEST_CASE("curve output does not depend on the worker count") {
  const std::string a = curve_table("P", saddle(), 9, 1).str();
  const std::string b = curve_table("P", saddle(), 9, 4).str();
  CHECK(a == b);
}

TEST_CASE("verification report schema") {
  VerifierOptions opt;
  opt.parts = {Part::Constants, Part::CSecondDeriv};
  const VerificationReport rep = verify_condition_g(opt);
  RunConfig cfg;
  cfg.subcommand = "verify";
  const auto j = verification_json(rep, cfg);
  for (const char* key : {"version", "config", "constants", "cells", "budgets", "verdict"}) CHECK(j.contains(key));
  CHECK(j["version"] == kReportVersion);
  CHECK(j["cells"].size() == rep.cells.size());
  CHECK(j["verdict"].get<bool>() == rep.verdict);
  CHECK(j["config"]["subcommand"] == "verify");
}

TEST_CASE("brute summaries") {
  RunConfig cfg;
  cfg.n = 10;
  cfg.trials = 6;
  cfg.m_max = 40;
  const auto runs = run_brute_trials(cfg);
  REQUIRE(runs.size() == 6);
  const CsvTable h = brute_histogram(runs, cfg);
  double total = 0.0;
  for (const auto& r : h.rows) total += r[2];
  CHECK(total == 6.0);
  const auto j = brute_json(runs, cfg);
  CHECK(j["trials"].size() == 6);
  cfg.workers = 1;
  const auto serial = run_brute_trials(cfg);
  for (std::size_t k = 0; k < runs.size(); ++k) CHECK(serial[k].M_N == runs[k].M_N);
}

TEST_CASE("JSON dumps are sorted and end with a newline") {
  const nlohmann::json j{{"b", 1}, {"a", 2}};
  const std::string s = dump_json(j);
  CHECK(s.back() == '\n');
  CHECK(s.find("\"a\"") < s.find("\"b\""));
}
