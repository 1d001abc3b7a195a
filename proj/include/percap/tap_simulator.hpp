// Finite-N Monte Carlo of the TAP (AMP) iteration for the Ising perceptron,
// the perturbed fixed-point solve that follows it, and the staged
// weighted-majority rounding that lifts every constraint margin.
//
// Disorder is drawn from boost::random::mt19937_64 through
// boost::random::normal_distribution (ziggurat). Both are specified by Boost
// independently of the standard library, so a seed fixes the array on every
// platform that ships the same Boost.
#pragma once

#include "percap/replica_saddle.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace percap {

// Largest M*N accepted by sample_disorder (8 bytes per entry).
inline constexpr std::size_t kMaxDisorderEntries = std::size_t{1} << 28;

struct Disorder {
  std::size_t M = 0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::vector<double> g;  // row-major, g[mu * N + i]

  double at(std::size_t mu, std::size_t i) const { return g[mu * N + i]; }
  const double* row(std::size_t mu) const { return g.data() + mu * N; }
};

// Throws std::length_error when M*N exceeds kMaxDisorderEntries.
Disorder sample_disorder(std::size_t M, std::size_t N, std::uint64_t seed);

// G x and G^T y with Neumaier-compensated accumulation in a fixed order.
std::vector<double> matvec(const Disorder& d, const std::vector<double>& x);
std::vector<double> matvec_t(const Disorder& d, const std::vector<double>& y);

struct TapState {
  int iter = 0;                // s
  std::vector<double> m;       // m^(s) = tanh(H^(s)), N entries
  std::vector<double> H;       // H^(s); atanh(sqrt(q_1)) at s = 1
  std::vector<double> h;       // h^(s), M entries
  std::vector<double> n;       // n^(s) = F(h^(s)) > 0
  double q = 0.0;              // |m|^2 / N
  double psi = 0.0;            // |n|^2 / N
  double b = 0.0;              // Onsager coefficient of the h update, 1 - q
  double d = 0.0;              // Onsager coefficient of the m update, (1, F'(h))/N
  double m_step = 0.0;         // |m^(s) - m^(s-1)| / sqrt(N); 0 at s = 1
  double n_step = 0.0;         // |n^(s) - n^(s-1)| / sqrt(N); 0 at s = 1
};

class TapDivergence : public std::runtime_error {
 public:
  TapDivergence(const std::string& what, TapState dump) : std::runtime_error(what), state(std::move(dump)) {}
  TapState state;
};

// t iterations from n^(0) = 0, m^(1) = sqrt(q_1) 1 with q_1 = sp.q_star, F = F_{q_1}.
// States s = 1..t are returned; throws TapDivergence if q_s leaves [0, 1].
std::vector<TapState> tap_iterate(const Disorder& d, const ModelParams& p, int t, const SaddlePoint& sp);

// sigma^2 = |1 - m^2|^2 / (N (1 - q)^2) for the state's m and q.
double sigma_sq_empirical(const TapState& state);

class NoFixedPoint : public std::domain_error {
 public:
  NoFixedPoint(const std::string& what, std::size_t idx) : std::domain_error(what), index(idx) {}
  std::size_t index;
};

struct PerturbedFixedPoint {
  std::vector<double> y;  // right-hand side (G m + G_hat J_hat)/sqrt(N) - kappa_perturb
  std::vector<double> h;  // h + (1 - q) F_q(h) = y
  std::vector<double> n;  // F_q(h)
  double max_residual = 0.0;
};

// Solves h + (1 - q) F_q(h) = y coordinatewise with q = state.q. extra_field
// is G_hat J_hat / sqrt(N) (empty means zero). Throws NoFixedPoint naming the
// first coordinate with y <= kappa.
PerturbedFixedPoint perturbed_fixed_point(const Disorder& d, const ModelParams& p, const TapState& state,
                                          const std::vector<double>& kappa_perturb,
                                          const std::vector<double>& extra_field = {});

// The same solve for a given right-hand side.
PerturbedFixedPoint solve_fixed_point_rhs(double q, double kappa, const std::vector<double>& y);

// Uniform draw from the cube [0, delta / exp(1/delta^2)]^M.
std::vector<double> sample_kappa_perturb(std::size_t M, double delta, std::uint64_t seed);

// ---- staged rounding ----

// N_s = (M delta / 4^s) / (4 s + 2 exp(1/delta^{3/4}) + 16), before rounding.
double kr_stage_size(std::size_t M, double delta, int s);
// Largest s with 2^s <= (M delta)^{1/4}.
int kr_stage_count(std::size_t M, double delta);
// T_s = sqrt(N) kappa + (M delta)^{1/2} (1 + 2^{-s}).
double kr_threshold(std::size_t M, std::size_t N, double delta, double kappa, int s);

struct KimRocheStage {
  int s = 0;
  std::size_t size = 0;       // N_s columns consumed (0 at s = 0)
  double threshold = 0.0;     // T_s
  double deficit_norm = 0.0;  // |f^(s)|
  double min_margin = 0.0;    // min_mu z^(s)_mu - sqrt(N) kappa
};

struct KimRocheRun {
  double delta = 0.0;
  int s_end = 0;
  std::vector<KimRocheStage> stages;   // s = 0, 1, ..., last stage run
  std::optional<std::vector<int>> j_hat;  // the assigned signs, present on success
  std::size_t columns_used = 0;
  bool budget_exhausted = false;
  bool base_case_holds = false;        // |f^(0)| <= N_1 / 5
  bool success = false;                // final min margin >= (M delta)^{1/2} / 2
  std::vector<std::string> warnings;   // violated proof-side constraints
};

// target is z^(0) = G m (unnormalized, M entries); d_hat supplies the reserved
// columns; N is the size of the main block (it sets sqrt(N) kappa and the
// N_hat/N warning). Stage sizes are the ceilings of kr_stage_size. Each stage
// sets its block by J_i = sgn((G_hat^T f^(s-1))_i) with sgn(0) = +1, and the run
// stops early once the deficit vanishes.
KimRocheRun kim_roche(const Disorder& d_hat, const std::vector<double>& target, double delta, double kappa, std::size_t N);

// Columns the formula asks for: the sum of the rounded stage sizes.
std::size_t kr_columns_needed(std::size_t M, double delta);

}  // namespace percap
