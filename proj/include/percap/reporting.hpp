// Run configuration and every file the command-line tool writes: CSV tables
// for the figure data, JSON reports for verification and simulations.
//
// CSV: comma-separated, '.' decimal point, 17 significant digits, one
// comment line with the (alpha, kappa, q*, psi*) context, then a header row.
// JSON: {version, config, constants, ...} with the payload keys of each report.
#pragma once

#include "percap/brute_force.hpp"
#include "percap/condition_g.hpp"
#include "percap/replica_saddle.hpp"
#include "percap/tap_simulator.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace percap {

inline constexpr const char* kReportVersion = "1.0.0";

struct RunConfig {
  std::string subcommand;
  double alpha = 0.833;
  double kappa = 0.0;
  // verify
  std::string part = "all";
  int refine = 1;
  // curves
  std::string curve;
  int npoints = 101;
  // simulations
  std::uint64_t seed = 1;
  int seeds = 20;
  int trials = 100;
  std::size_t n = 4000;
  std::size_t m = 2000;
  int t = 30;
  double delta = 0.3;
  std::size_t m_max = 200;
  // output
  std::string out;
  std::string format = "json";
  unsigned workers = 0;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

// %.17g; non-finite values print as nan, inf, -inf.
std::string format_double(double x);

struct CsvTable {
  std::string context;  // the comment line, without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string str() const;
};

std::string context_line(const SaddlePoint& sp);

// Solver summary: q*, psi*, AT slope, G*, H*, P*.
nlohmann::json fixed_point_json(const SaddlePoint& sp, const RunConfig& cfg);

// Curve names: qrecursion, ell, H, P, B, HPA. Throws std::invalid_argument otherwise.
bool is_curve_name(const std::string& which);
CsvTable curve_table(const std::string& which, const SaddlePoint& sp, int npoints, unsigned workers = 0);

nlohmann::json verification_json(const VerificationReport& rep, const RunConfig& cfg);

struct TapSeedRun {
  std::uint64_t seed = 0;
  std::vector<TapState> states;
  double sigma_sq = 0.0;
};
// Per-seed trajectories for seeds cfg.seed .. cfg.seed + cfg.seeds - 1 at N = cfg.n, M = round(alpha N).
std::vector<TapSeedRun> run_tap_seeds(const RunConfig& cfg, const SaddlePoint& sp);
nlohmann::json tap_json(const std::vector<TapSeedRun>& runs, const SaddlePoint& sp, const RunConfig& cfg);

struct KimRocheTrial {
  std::uint64_t seed = 0;
  KimRocheRun run;
};
// Each trial runs TAP for cfg.t steps on an M x round(M/alpha) block and
// rounds kr_columns_needed reserved columns against z = G m.
std::vector<KimRocheTrial> run_kim_roche_trials(const RunConfig& cfg, const SaddlePoint& sp);
nlohmann::json kim_roche_json(const std::vector<KimRocheTrial>& trials, const RunConfig& cfg);

// Capacities of cfg.trials instances of size cfg.n with seeds cfg.seed + k.
std::vector<CapacityResult> run_brute_trials(const RunConfig& cfg);
nlohmann::json brute_json(const std::vector<CapacityResult>& runs, const RunConfig& cfg);
// Histogram of M_N / N: one row per distinct value with its count.
CsvTable brute_histogram(const std::vector<CapacityResult>& runs, const RunConfig& cfg);

// Serialized JSON with a trailing newline, keys sorted, indent 2.
std::string dump_json(const nlohmann::json& j);

// Writes content to path; throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace percap
