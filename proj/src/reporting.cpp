#include "percap/reporting.hpp"

#include "percap/overlap_exponents.hpp"
#include "percap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace percap {

using nlohmann::json;

namespace {

json bracket_json(const BoundBracket& b) {
  auto side = [](double x) -> json {
    if (std::isfinite(x)) return x;
    return nullptr;  // one-sided bounds leave the open side empty
  };
  return {{"lo", side(b.lo)}, {"hi", side(b.hi)}, {"budget", b.budget}};
}

json check_json(const NamedCheck& k) {
  return {{"name", k.name}, {"lo", k.lo}, {"hi", k.hi}, {"relation", k.relation}, {"threshold", k.threshold}, {"pass", k.pass}};
}

json saddle_json(const SaddlePoint& sp) {
  return {{"alpha", sp.alpha},   {"kappa", sp.kappa},     {"q_star", sp.q_star},          {"psi_star", sp.psi_star},
          {"gamma", sp.gamma},   {"at_slope", sp.at_slope}, {"g_star", sp.g_star},        {"certified", sp.certified}};
}

json header(const RunConfig& cfg) { return {{"version", kReportVersion}, {"config", cfg.to_json()}}; }

std::vector<double> uniform_grid(double a, double b, int n) {
  if (n < 2) throw std::invalid_argument("curve: need npoints >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(j)] = a + (b - a) * j / (n - 1);
  g.back() = b;
  return g;
}

std::uint64_t hat_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

}  // namespace

json RunConfig::to_json() const {
  return {{"subcommand", subcommand}, {"alpha", alpha},   {"kappa", kappa},   {"part", part},     {"refine", refine},
          {"curve", curve},           {"npoints", npoints}, {"seed", seed},   {"seeds", seeds},   {"trials", trials},
          {"n", n},                   {"m", m},           {"t", t},           {"delta", delta},   {"m_max", m_max},
          {"out", out},               {"format", format}};
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  c.subcommand = j.at("subcommand").get<std::string>();
  c.alpha = j.at("alpha").get<double>();
  c.kappa = j.at("kappa").get<double>();
  c.part = j.at("part").get<std::string>();
  c.refine = j.at("refine").get<int>();
  c.curve = j.at("curve").get<std::string>();
  c.npoints = j.at("npoints").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.seeds = j.at("seeds").get<int>();
  c.trials = j.at("trials").get<int>();
  c.n = j.at("n").get<std::size_t>();
  c.m = j.at("m").get<std::size_t>();
  c.t = j.at("t").get<int>();
  c.delta = j.at("delta").get<double>();
  c.m_max = j.at("m_max").get<std::size_t>();
  c.out = j.at("out").get<std::string>();
  c.format = j.at("format").get<std::string>();
  return c;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string CsvTable::str() const {
  std::ostringstream os;
  if (!context.empty()) os << "# " << context << '\n';
  for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << format_double(r[k]);
    os << '\n';
  }
  return os.str();
}

std::string context_line(const SaddlePoint& sp) {
  return "alpha=" + format_double(sp.alpha) + " kappa=" + format_double(sp.kappa) + " q_star=" + format_double(sp.q_star) +
         " psi_star=" + format_double(sp.psi_star);
}

json fixed_point_json(const SaddlePoint& sp, const RunConfig& cfg) {
  json j = header(cfg);
  j["constants"] = saddle_json(sp);
  j["H_star"] = h_star(sp);
  j["P_star"] = p_star(sp);
  return j;
}

bool is_curve_name(const std::string& which) {
  static const char* names[] = {"qrecursion", "ell", "H", "P", "B", "HPA"};
  return std::find(std::begin(names), std::end(names), which) != std::end(names);
}

CsvTable curve_table(const std::string& which, const SaddlePoint& sp, int npoints, unsigned workers) {
  if (!is_curve_name(which)) throw std::invalid_argument("unknown curve: " + which);
  const unsigned w = workers == 0 ? worker_count() : workers;
  CsvTable t;
  t.context = context_line(sp);
  const ModelParams p{sp.kappa, sp.alpha};

  if (which == "qrecursion") {
    // Open grid: R(q) diverges at both ends of [0, 1].
    const std::vector<double> g = uniform_grid(0.0, 1.0, npoints + 2);
    t.columns = {"q", "P_of_R_q"};
    const auto v = parallel_map<double>(static_cast<std::size_t>(npoints), [&](std::size_t i) { return P_of_psi(R_of_q(g[i + 1], p)); }, w);
    for (int i = 0; i < npoints; ++i) t.rows.push_back({g[static_cast<std::size_t>(i) + 1], v[static_cast<std::size_t>(i)]});
    return t;
  }
  if (which == "ell") {
    const std::vector<double> g = uniform_grid(-1.0, 1.0, npoints);
    t.columns = {"tau", "lambda"};
    const auto v = parallel_map<double>(g.size(), [&](std::size_t i) { return overlap_from_tau(g[i], sp).lambda; }, w);
    for (std::size_t i = 0; i < g.size(); ++i) t.rows.push_back({g[i], v[i]});
    return t;
  }

  const double lmin = lambda_min(sp);
  const std::vector<double> g = uniform_grid(lmin, 1.0, npoints);
  auto point = [&](std::size_t i) {
    if (i == 0) return overlap_from_tau(-1.0, sp);
    if (g[i] == 1.0) return overlap_from_tau(1.0, sp);
    if (g[i] == 0.0) return OverlapPoint{0.0, 0.0, 1.0};
    return ell_inverse(g[i], sp);
  };
  // B(1, s) = s^2 / 2.
  auto B_at = [&](double l) {
    const double s = -0.3 * l;
    return l == 1.0 ? 0.5 * s * s : B_fn(l, s, sp);
  };
  if (which == "H") {
    t.columns = {"lambda", "H"};
    const auto v = parallel_map<double>(g.size(), [&](std::size_t i) { return H_of_lambda(point(i), sp); }, w);
    for (std::size_t i = 0; i < g.size(); ++i) t.rows.push_back({g[i], v[i]});
  } else if (which == "P") {
    t.columns = {"lambda", "P"};
    const auto v = parallel_map<double>(g.size(), [&](std::size_t i) { return P_of_lambda(g[i], sp); }, w);
    for (std::size_t i = 0; i < g.size(); ++i) t.rows.push_back({g[i], v[i]});
  } else if (which == "B") {
    t.columns = {"lambda", "s", "B"};
    const auto v = parallel_map<double>(g.size(), [&](std::size_t i) { return B_at(g[i]); }, w);
    for (std::size_t i = 0; i < g.size(); ++i) t.rows.push_back({g[i], -0.3 * g[i], v[i]});
  } else {
    t.columns = {"lambda", "H_plus_P", "H_plus_P_plus_B"};
    const auto v = parallel_map<std::vector<double>>(g.size(), [&](std::size_t i) {
      const double hp = H_of_lambda(point(i), sp) + P_of_lambda(g[i], sp);
      return std::vector<double>{hp, hp + B_at(g[i])};
    }, w);
    for (std::size_t i = 0; i < g.size(); ++i) t.rows.push_back({g[i], v[i][0], v[i][1]});
  }
  return t;
}

json verification_json(const VerificationReport& rep, const RunConfig& cfg) {
  json j = header(cfg);
  json constants = json::array();
  for (const auto& k : rep.constants) constants.push_back(check_json(k));
  j["constants"] = constants;
  json cells = json::array();
  for (const auto& c : rep.cells) {
    json b = json::array();
    for (const auto& it : c.budgets) b.push_back({{"name", it.name}, {"value", it.value}});
    cells.push_back({{"part", part_name(c.part)},
                     {"variant", c.variant},
                     {"tau_lo", c.tau_lo},
                     {"tau_hi", c.tau_hi},
                     {"lambda_bracket", bracket_json(c.lambda_bracket)},
                     {"bound_value", bracket_json(c.bound_value)},
                     {"relation", c.relation},
                     {"pass", c.pass},
                     {"budgets", b},
                     {"note", c.note}});
  }
  j["cells"] = cells;
  json budgets = json::object();
  for (const auto& b : rep.budgets) budgets[b.name] = b.value;
  budgets["total"] = rep.budget_total;
  j["budgets"] = budgets;
  json checks = json::array();
  for (const auto& k : rep.checks) checks.push_back(check_json(k));
  j["checks"] = checks;
  json diag = json::array();
  for (const auto& k : rep.diagnostics) diag.push_back(check_json(k));
  j["diagnostics"] = diag;
  json cov = json::array();
  for (const auto& c : rep.coverage)
    cov.push_back({{"part", part_name(c.part)},
                   {"claim", c.claim},
                   {"certified", {c.certified_lo, c.certified_hi}},
                   {"required", {c.required_lo, c.required_hi}},
                   {"pass", c.pass}});
  j["coverage"] = cov;
  j["notes"] = rep.notes;
  j["first_failed_cell"] = rep.first_failed_cell ? json(*rep.first_failed_cell) : json(nullptr);
  j["stopped_early"] = rep.stopped_early;
  j["verdict"] = rep.verdict;
  return j;
}

std::vector<TapSeedRun> run_tap_seeds(const RunConfig& cfg, const SaddlePoint& sp) {
  const ModelParams p{cfg.kappa, cfg.alpha};
  const auto M = static_cast<std::size_t>(std::lround(cfg.alpha * static_cast<double>(cfg.n)));
  std::vector<TapSeedRun> runs;
  // Seeds run one after another; each matvec already uses the workers.
  for (int k = 0; k < cfg.seeds; ++k) {
    TapSeedRun r;
    r.seed = cfg.seed + static_cast<std::uint64_t>(k);
    const Disorder d = sample_disorder(M, cfg.n, r.seed);
    r.states = tap_iterate(d, p, cfg.t, sp);
    r.sigma_sq = sigma_sq_empirical(r.states.back());
    runs.push_back(std::move(r));
  }
  return runs;
}

json tap_json(const std::vector<TapSeedRun>& runs, const SaddlePoint& sp, const RunConfig& cfg) {
  json j = header(cfg);
  j["constants"] = saddle_json(sp);
  json arr = json::array();
  double mean_dev = 0.0;
  for (const auto& r : runs) {
    json it = json::array();
    for (const auto& s : r.states)
      it.push_back({{"s", s.iter}, {"q", s.q}, {"psi", s.psi}, {"b", s.b}, {"d", s.d}, {"m_step", s.m_step}, {"n_step", s.n_step}});
    const double qt = r.states.back().q;
    mean_dev += std::abs(qt - sp.q_star);
    arr.push_back({{"seed", r.seed}, {"iterations", it}, {"q_t", qt}, {"sigma_sq", r.sigma_sq}});
  }
  j["runs"] = arr;
  if (!runs.empty()) mean_dev /= static_cast<double>(runs.size());
  j["summary"] = {{"mean_abs_q_t_minus_q_star", mean_dev},
                  {"H2_at_zero", H_deriv(OverlapPoint{0.0, 0.0, 1.0}, sp, 2)}};
  return j;
}

std::vector<KimRocheTrial> run_kim_roche_trials(const RunConfig& cfg, const SaddlePoint& sp) {
  const ModelParams p{cfg.kappa, cfg.alpha};
  const auto N = static_cast<std::size_t>(std::lround(static_cast<double>(cfg.m) / cfg.alpha));
  const std::size_t cols = std::max<std::size_t>(1, kr_columns_needed(cfg.m, cfg.delta));
  std::vector<KimRocheTrial> out;
  for (int k = 0; k < cfg.trials; ++k) {
    KimRocheTrial tr;
    tr.seed = cfg.seed + static_cast<std::uint64_t>(k);
    const Disorder d = sample_disorder(cfg.m, N, tr.seed);
    const auto states = tap_iterate(d, p, cfg.t, sp);
    const std::vector<double> z = matvec(d, states.back().m);
    const Disorder d_hat = sample_disorder(cfg.m, cols, hat_seed(tr.seed));
    tr.run = kim_roche(d_hat, z, cfg.delta, cfg.kappa, N);
    out.push_back(std::move(tr));
  }
  return out;
}

json kim_roche_json(const std::vector<KimRocheTrial>& trials, const RunConfig& cfg) {
  json j = header(cfg);
  j["constants"] = {{"s_end", kr_stage_count(cfg.m, cfg.delta)}, {"columns", kr_columns_needed(cfg.m, cfg.delta)}};
  json arr = json::array();
  int ok = 0;
  for (const auto& t : trials) {
    json st = json::array();
    for (const auto& s : t.run.stages)
      st.push_back({{"s", s.s}, {"size", s.size}, {"threshold", s.threshold}, {"deficit_norm", s.deficit_norm}, {"min_margin", s.min_margin}});
    arr.push_back({{"seed", t.seed},
                   {"stages", st},
                   {"success", t.run.success},
                   {"base_case_holds", t.run.base_case_holds},
                   {"budget_exhausted", t.run.budget_exhausted},
                   {"warnings", t.run.warnings}});
    ok += t.run.success;
  }
  j["trials"] = arr;
  j["success_fraction"] = trials.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(trials.size());
  return j;
}

std::vector<CapacityResult> run_brute_trials(const RunConfig& cfg) {
  return parallel_map<CapacityResult>(static_cast<std::size_t>(cfg.trials), [&](std::size_t k) {
    return capacity_MN(cfg.n, cfg.kappa, cfg.m_max, cfg.seed + k);
  }, cfg.workers == 0 ? worker_count() : cfg.workers);
}

json brute_json(const std::vector<CapacityResult>& runs, const RunConfig& cfg) {
  json j = header(cfg);
  json arr = json::array();
  double sum = 0.0;
  int censored = 0;
  std::vector<double> ratios;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& r = runs[k];
    const double ratio = static_cast<double>(r.M_N) / static_cast<double>(r.N);
    ratios.push_back(ratio);
    sum += ratio;
    censored += r.censored;
    arr.push_back({{"seed", cfg.seed + k}, {"M_N", r.M_N}, {"censored", r.censored}, {"Z_prefix", r.Z_prefix}});
  }
  j["constants"] = {{"N", cfg.n}, {"kappa", cfg.kappa}, {"M_max", cfg.m_max}};
  j["trials"] = arr;
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios.empty() ? 0.0
                                       : (ratios.size() % 2 ? ratios[ratios.size() / 2]
                                                            : 0.5 * (ratios[ratios.size() / 2 - 1] + ratios[ratios.size() / 2]));
  j["summary"] = {{"mean_M_N_over_N", runs.empty() ? 0.0 : sum / static_cast<double>(runs.size())},
                  {"median_M_N_over_N", median},
                  {"censored", censored}};
  return j;
}

CsvTable brute_histogram(const std::vector<CapacityResult>& runs, const RunConfig& cfg) {
  std::map<std::size_t, int> counts;
  for (const auto& r : runs) ++counts[r.M_N];
  CsvTable t;
  t.context = "N=" + std::to_string(cfg.n) + " kappa=" + format_double(cfg.kappa) + " trials=" + std::to_string(runs.size());
  t.columns = {"M_N", "M_N_over_N", "count"};
  for (const auto& [m, c] : counts)
    t.rows.push_back({static_cast<double>(m), static_cast<double>(m) / static_cast<double>(cfg.n), static_cast<double>(c)});
  return t;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace percap
