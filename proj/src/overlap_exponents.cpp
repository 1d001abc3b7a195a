#include "percap/overlap_exponents.hpp"

#include "percap/parallel.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace percap {

namespace {

constexpr double kBandSlack = 1e-14;
constexpr double kZMax = kSaddleZMax;

// 1+m and 1-m for m = tanh H, each without cancellation.
struct OnePlusMinus {
  double m, a, b;  // a = 1+m, b = 1-m
};

OnePlusMinus one_pm(double H) {
  const double e = std::exp(-2.0 * std::abs(H));
  const double big = 2.0 / (1.0 + e), small = 2.0 * e / (1.0 + e);
  const double m = std::tanh(H);
  return H >= 0.0 ? OnePlusMinus{m, big, small} : OnePlusMinus{m, small, big};
}

double gauss_z(const std::function<double(double)>& f, double tol = 1e-14) { return integrate_gauss(f, -kZMax, kZMax, tol); }

double c_lambda(double lambda) { return std::sqrt((1.0 - lambda) / (1.0 + lambda)); }

void check_open_lambda(double lambda, const char* who) {
  if (!(lambda > -1.0 && lambda < 1.0)) throw std::domain_error(std::string(who) + ": lambda must lie in (-1,1)");
}

}  // namespace

PairAlgebra pair_algebra(double H, double A) {
  if (!(A > 0.0) || !std::isfinite(A)) throw std::invalid_argument("pair_algebra: A must be positive and finite");
  const OnePlusMinus t = one_pm(H);
  const double s2 = t.a * t.b;  // 1 - m^2
  PairAlgebra r;
  r.m = t.m;
  r.Delta = std::sqrt(A * A * s2 + t.m * t.m);
  // Both printed forms of B agree; each is used where its denominator is safe.
  r.B = t.m >= 0.0 ? (r.Delta + t.m) / (A * t.b) : A * t.a / (r.Delta - t.m);
  r.S = H > 0.0 ? 1.0 / r.B : (H < 0.0 ? r.B : 1.0);
  r.D = (A - 1.0) * (A + 1.0) * s2 * s2 / ((r.Delta + 1.0) * (r.Delta + 1.0));
  return r;
}

double D_of(double H, double A) {
  if (std::isinf(A)) return 1.0 - std::tanh(H) * std::tanh(H);
  const OnePlusMinus t = one_pm(H);
  const double s2 = t.a * t.b;
  const double delta = std::sqrt(A * A * s2 + t.m * t.m);
  return (A - 1.0) * (A + 1.0) * s2 * s2 / ((delta + 1.0) * (delta + 1.0));
}

double dD_dA(double H, double A) {
  const OnePlusMinus t = one_pm(H);
  const double s2 = t.a * t.b;
  const double delta = std::sqrt(A * A * s2 + t.m * t.m);
  if (delta == 0.0) return 0.0;
  return 2.0 * A * s2 * s2 / (delta * (delta + 1.0) * (delta + 1.0));
}

double band_lo(double H) {
  const OnePlusMinus t = one_pm(H);
  const double b = std::min(t.a, t.b);
  return -b * b;
}

double band_hi(double H) {
  const OnePlusMinus t = one_pm(H);
  return t.a * t.b;
}

PairLaw pair_law(double H, double D) {
  const double lo = band_lo(H), hi = band_hi(H);
  if (D < lo - kBandSlack || D > hi + kBandSlack) throw std::domain_error("pair_law: D outside the nonnegativity band");
  D = std::clamp(D, lo, hi);
  const OnePlusMinus t = one_pm(H);
  PairLaw law;
  law.H = H;
  law.m = t.m;
  law.p = 0.5 * t.a;
  law.D = D;
  const double off = std::max(0.0, 0.25 * (t.a * t.b - D));
  law.cells = {std::max(0.0, 0.25 * (t.a * t.a + D)), off, off, std::max(0.0, 0.25 * (t.b * t.b + D))};
  return law;
}

double gamma_entropy(double H, double D) {
  const PairLaw law = pair_law(H, D);
  double g = 0.0;
  for (double c : law.cells)
    if (c > 0.0) g -= c * std::log(c);
  return g;
}

double dGamma_dD(double H, double D) {
  const PairLaw law = pair_law(H, D);
  const auto& c = law.cells;
  return -0.25 * std::log(c[0] * c[3] / (c[1] * c[2]));
}

double dGamma_dm(double H, double D) {
  const OnePlusMinus t = one_pm(H);
  const double p11 = t.a * t.a + D, p22 = t.b * t.b + D, p12 = t.a * t.b - D;
  return 0.5 * std::log(p22 / p11) + 0.5 * t.m * std::log(p12 * p12 / (p11 * p22));
}

double A_of_tau(double tau) {
  if (!(tau >= -1.0 && tau <= 1.0)) throw std::domain_error("A_of_tau: tau must lie in [-1,1]");
  if (tau == 1.0) return std::numeric_limits<double>::infinity();
  return (1.0 + tau) / (1.0 - tau);  // = exp(2 atanh tau)
}

double tau_of_A(double A) {
  if (!(A >= 0.0)) throw std::domain_error("tau_of_A: A must be nonnegative");
  if (std::isinf(A)) return 1.0;
  return (A - 1.0) / (A + 1.0);
}

double ell(double A, const SaddlePoint& sp) {
  if (!(A >= 0.0)) throw std::domain_error("ell: A must be nonnegative");
  if (std::isinf(A)) return 1.0;
  const double s = std::sqrt(sp.psi_star);
  return gauss_z([&](double z) { return D_of(s * z, A); }) / (1.0 - sp.q_star);
}

double ell_prime(double A, const SaddlePoint& sp) {
  const double s = std::sqrt(sp.psi_star);
  return gauss_z([&](double z) { return dD_dA(s * z, A); }) / (1.0 - sp.q_star);
}

double lambda_min(const SaddlePoint& sp) {
  const double s = std::sqrt(sp.psi_star);
  return -gauss_z([&](double z) {
           const double b = 1.0 - std::abs(std::tanh(s * z));
           return b * b;
         }) /
         (1.0 - sp.q_star);
}

OverlapPoint overlap_from_tau(double tau, const SaddlePoint& sp) {
  OverlapPoint pt;
  pt.tau = tau;
  pt.A = A_of_tau(tau);
  pt.lambda = ell(pt.A, sp);
  return pt;
}

OverlapPoint ell_inverse(double lambda, const SaddlePoint& sp) {
  const double lmin = lambda_min(sp);
  if (!(lambda > lmin && lambda < 1.0)) throw std::domain_error("ell_inverse: lambda must lie in (lambda_min, 1)");
  if (lambda == 0.0) return {0.0, 0.0, 1.0};
  auto f = [&](double tau) { return ell(A_of_tau(tau), sp) - lambda; };
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15; };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::bisect(f, -1.0, std::nextafter(1.0, 0.0), tol, iters);
  return overlap_from_tau(0.5 * (r.first + r.second), sp);
}

double entropy_of_A(double A, const SaddlePoint& sp) {
  const double s = std::sqrt(sp.psi_star);
  return -2.0 * h_star(sp) + gauss_z([&](double z) {
           const double H = s * z;
           return gamma_entropy(H, D_of(H, A));
         });
}

double H_of_lambda(const OverlapPoint& pt, const SaddlePoint& sp) {
  if (pt.lambda >= 1.0 || std::isinf(pt.A)) return -h_star(sp);
  return entropy_of_A(pt.A, sp);
}

double H_deriv(const OverlapPoint& pt, const SaddlePoint& sp, int order) {
  if (!(pt.A > 0.0) || std::isinf(pt.A)) throw std::domain_error("H_deriv: need 0 < A < inf");
  if (order == 1) return -0.5 * (1.0 - sp.q_star) * std::log(pt.A);
  if (order == 2) return -(1.0 - sp.q_star) / (2.0 * pt.A * ell_prime(pt.A, sp));
  throw std::invalid_argument("H_deriv: order must be 1 or 2");
}

namespace {

// Shared driver for the constraint integrals: integrates
// phi(z) * E(xi) exp(-xi u - u^2/2) * k(xi, u) over z and u >= 0.
template <class K>
double constraint_integral(const SaddlePoint& sp, const ExponentOptions& opt, bool gamma_form, K&& k) {
  QuadOptions qo;
  qo.tol = opt.tol;
  auto xi_of = [&](double z) { return gamma_form ? sp.gamma * z : xi_qz(sp.q_star, sp.kappa, z); };
  auto f = [&](double z, double u) {
    const double xi = xi_of(z);
    const double w = phi(z) * ee(xi) * std::exp(-xi * u - 0.5 * u * u);
    return std::array<double, 1>{w == 0.0 ? 0.0 : w * k(xi, u)};
  };
  auto ulo = [](double) { return 0.0; };
  auto uhi = [&](double z) { return std::max(0.0, -xi_of(z)) + opt.u_span; };
  auto ubr = [&](double z) {
    const double xi = xi_of(z);
    return xi < 0.0 ? std::vector<double>{-xi} : std::vector<double>{};
  };
  return adaptive_gk21_2d<1>(f, -kZMax, kZMax, ulo, uhi, ubr, qo, {0.0}).value[0];
}

double I_s_impl(double lambda, double s, const SaddlePoint& sp, const ExponentOptions& opt, bool gamma_form) {
  check_open_lambda(lambda, "I_s");
  const double c = c_lambda(lambda);
  const double slope = lambda / std::sqrt(1.0 - lambda * lambda);
  const double tilt = s / (std::sqrt(sp.psi_star) * std::sqrt(1.0 - sp.q_star));
  // (xi - lambda nu)/sqrt(1-lambda^2) with nu = xi + u.
  return sp.alpha * constraint_integral(sp, opt, gamma_form, [&](double xi, double u) {
           return log_Phibar(c * xi - slope * u - ee(xi) * tilt);
         });
}

}  // namespace

double I_s(double lambda, double s, const SaddlePoint& sp, const ExponentOptions& opt) { return I_s_impl(lambda, s, sp, opt, false); }

double I_s_gamma_form(double lambda, double s, const SaddlePoint& sp, const ExponentOptions& opt) {
  if (sp.kappa != 0.0) throw std::invalid_argument("I_s_gamma_form: only defined for kappa = 0");
  return I_s_impl(lambda, s, sp, opt, true);
}

double dI_ds(double lambda, double s, const SaddlePoint& sp, const ExponentOptions& opt) {
  check_open_lambda(lambda, "dI_ds");
  const double c = c_lambda(lambda);
  const double slope = lambda / std::sqrt(1.0 - lambda * lambda);
  const double scale = std::sqrt(sp.psi_star) * std::sqrt(1.0 - sp.q_star);
  return sp.alpha * constraint_integral(sp, opt, false, [&](double xi, double u) {
           const double e = ee(xi);
           return ee(c * xi - slope * u - e * s / scale) * e / scale;
         });
}

double P_of_lambda(double lambda, const SaddlePoint& sp, const ExponentOptions& opt) {
  if (lambda == 1.0) return -p_star(sp);
  if (lambda == 0.0) return 0.0;
  const double pq = sp.psi_star * (1.0 - sp.q_star);
  return -pq * lambda / (1.0 + lambda) + I_s(lambda, 0.0, sp, opt) - I_s(0.0, 0.0, sp, opt);
}

namespace {

double B_given_I(double lambda, double s, double I0, const SaddlePoint& sp, const ExponentOptions& opt) {
  if (s == 0.0) return 0.0;
  const double lin = std::sqrt(sp.psi_star) * std::sqrt(1.0 - sp.q_star) * c_lambda(lambda);
  return 0.5 * s * s - lin * s + I_s(lambda, s, sp, opt) - I0;
}

}  // namespace

double B_fn(double lambda, double s, const SaddlePoint& sp, const ExponentOptions& opt) {
  check_open_lambda(lambda, "B_fn");
  if (s == 0.0) return 0.0;
  return B_given_I(lambda, s, I_s(lambda, 0.0, sp, opt), sp, opt);
}

TiltMin A_fn(double lambda, const SaddlePoint& sp, const ExponentOptions& opt) {
  if (lambda == 1.0) return {0.0, 0.0};
  check_open_lambda(lambda, "A_fn");
  const double I0 = I_s(lambda, 0.0, sp, opt);
  auto f = [&](double s) { return B_given_I(lambda, s, I0, sp, opt); };
  double range = opt.s_bracket;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::brent_find_minima(f, -range, range, 24, iters);
    const bool on_edge = range - std::abs(r.first) < 1e-3 * range;
    if (!on_edge) {
      // B(lambda, 0) = 0 is always available, so the infimum is at most 0.
      if (r.second > 0.0) return {0.0, 0.0};
      return {r.second, r.first};
    }
    range *= 2.0;
  }
  throw std::runtime_error("A_fn: tilt minimizer stays on the edge of the search range");
}

double Q_fn(double lambda, const SaddlePoint& sp, const ExponentOptions& opt) {
  check_open_lambda(lambda, "Q_fn");
  constexpr double s = 0.2;
  const double pq = sp.psi_star * (1.0 - sp.q_star);
  const double lin = std::sqrt(pq) * c_lambda(lambda);
  return 0.5 * s * s - lin * s - pq * lambda / (1.0 + lambda) + I_s(lambda, s, sp, opt) - I_s(0.0, 0.0, sp, opt);
}

ExponentSample exponent_sample(double lambda, const SaddlePoint& sp, const ExponentOptions& opt) {
  ExponentSample e;
  e.lambda = lambda;
  if (lambda == 1.0) {
    e.H_val = -h_star(sp);
    e.P_val = -p_star(sp);
    e.A_val = 0.0;
    e.s_opt = 0.0;
    e.S_val = e.H_val + e.P_val;
    e.S_P = e.S_val;
    e.S_Q = e.H_val + e.P_val + 0.02;  // B(1, s) = s^2/2
    return e;
  }
  const OverlapPoint pt = lambda == 0.0 ? OverlapPoint{0.0, 0.0, 1.0} : ell_inverse(lambda, sp);
  e.H_val = H_of_lambda(pt, sp);
  e.P_val = P_of_lambda(lambda, sp, opt);
  const TiltMin a = A_fn(lambda, sp, opt);
  e.A_val = a.value;
  e.s_opt = a.s_opt;
  e.S_val = e.H_val + e.P_val + e.A_val;
  e.S_P = e.H_val + e.P_val;
  e.S_Q = e.H_val + Q_fn(lambda, sp, opt);
  return e;
}

std::vector<ExponentSample> S_curves(const std::vector<double>& grid, const SaddlePoint& sp, const ExponentOptions& opt) {
  return parallel_map<ExponentSample>(grid.size(), [&](std::size_t i) { return exponent_sample(grid[i], sp, opt); });
}

}  // namespace percap
