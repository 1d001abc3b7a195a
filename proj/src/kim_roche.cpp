// Staged weighted-majority rounding of the reserved columns.
#include "percap/tap_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace percap {

double kr_stage_size(std::size_t M, double delta, int s) {
  const double Md = static_cast<double>(M) * delta;
  return (Md / std::pow(4.0, s)) / (4.0 * s + 2.0 * std::exp(1.0 / std::pow(delta, 0.75)) + 16.0);
}

int kr_stage_count(std::size_t M, double delta) {
  const double cap = std::pow(static_cast<double>(M) * delta, 0.25);
  int s = 0;
  while (std::ldexp(1.0, s + 1) <= cap) ++s;
  return s;
}

double kr_threshold(std::size_t M, std::size_t N, double delta, double kappa, int s) {
  return std::sqrt(static_cast<double>(N)) * kappa + std::sqrt(static_cast<double>(M) * delta) * (1.0 + std::ldexp(1.0, -s));
}

std::size_t kr_columns_needed(std::size_t M, double delta) {
  std::size_t total = 0;
  for (int s = 1; s <= kr_stage_count(M, delta); ++s) total += static_cast<std::size_t>(std::ceil(kr_stage_size(M, delta, s)));
  return total;
}

namespace {

struct Deficit {
  std::vector<double> f;
  double norm = 0.0;
  double min_margin = 0.0;
};

Deficit deficit(const std::vector<double>& z, double T, double base) {
  Deficit r;
  r.f.resize(z.size());
  double ss = 0.0;
  r.min_margin = z.empty() ? 0.0 : z[0] - base;
  for (std::size_t mu = 0; mu < z.size(); ++mu) {
    r.f[mu] = std::max(0.0, T - z[mu]);
    ss += r.f[mu] * r.f[mu];
    r.min_margin = std::min(r.min_margin, z[mu] - base);
  }
  r.norm = std::sqrt(ss);
  return r;
}

}  // namespace

KimRocheRun kim_roche(const Disorder& d_hat, const std::vector<double>& target, double delta, double kappa, std::size_t N) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("kim_roche: need 0 < delta < 1");
  if (target.size() != d_hat.M) throw std::invalid_argument("kim_roche: target must have M entries");
  if (N == 0) throw std::invalid_argument("kim_roche: need N >= 1");
  const std::size_t M = d_hat.M;
  const double base = std::sqrt(static_cast<double>(N)) * kappa;

  KimRocheRun run;
  run.delta = delta;
  run.s_end = kr_stage_count(M, delta);

  const double ratio_cap = delta / std::exp(1.0 / std::pow(delta, 2.0 / 3.0));
  if (static_cast<double>(d_hat.N) / static_cast<double>(N) > ratio_cap) {
    std::ostringstream os;
    os << "N_hat/N = " << static_cast<double>(d_hat.N) / static_cast<double>(N) << " exceeds delta/exp(1/delta^{2/3}) = " << ratio_cap;
    run.warnings.push_back(os.str());
  }

  std::vector<double> z = target;
  Deficit f = deficit(z, kr_threshold(M, N, delta, kappa, 0), base);
  run.stages.push_back({0, 0, kr_threshold(M, N, delta, kappa, 0), f.norm, f.min_margin});
  run.base_case_holds = f.norm <= kr_stage_size(M, delta, 1) / 5.0;
  if (!run.base_case_holds) {
    std::ostringstream os;
    os << "base case fails: |f^(0)| = " << f.norm << " > N_1/5 = " << kr_stage_size(M, delta, 1) / 5.0;
    run.warnings.push_back(os.str());
  }

  std::vector<int> j;
  j.reserve(d_hat.N);
  for (int s = 1; s <= run.s_end && f.norm > 0.0; ++s) {
    const auto Ns = static_cast<std::size_t>(std::ceil(kr_stage_size(M, delta, s)));
    if (run.columns_used + Ns > d_hat.N) {
      run.budget_exhausted = true;
      std::ostringstream os;
      os << "stage " << s << " needs " << Ns << " columns but only " << d_hat.N - run.columns_used << " remain";
      run.warnings.push_back(os.str());
      break;
    }
    // Weighted majority of each column, weights the current deficit.
    for (std::size_t i = run.columns_used; i < run.columns_used + Ns; ++i) {
      double w = 0.0;
      for (std::size_t mu = 0; mu < M; ++mu) w += d_hat.at(mu, i) * f.f[mu];
      j.push_back(w >= 0.0 ? 1 : -1);
    }
    for (std::size_t mu = 0; mu < M; ++mu) {
      const double* r = d_hat.row(mu);
      for (std::size_t i = run.columns_used; i < run.columns_used + Ns; ++i) z[mu] += r[i] * j[i];
    }
    run.columns_used += Ns;
    const double T = kr_threshold(M, N, delta, kappa, s);
    f = deficit(z, T, base);
    run.stages.push_back({s, Ns, T, f.norm, f.min_margin});
  }

  run.success = !run.budget_exhausted && run.stages.back().min_margin >= std::sqrt(static_cast<double>(M) * delta) / 2.0;
  if (run.success) run.j_hat = j;
  return run;
}

}  // namespace percap
