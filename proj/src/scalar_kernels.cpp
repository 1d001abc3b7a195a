#include "percap/scalar_kernels.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <utility>

namespace percap {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr int kCfDepth = 60;

// Tails of the Laplace continued fraction T_k = k/(x + T_{k+1}); E(x) - x = T_1.
struct CfTails {
  double t1, t2, t3;
};

CfTails cf_tails(double x) {
  double t = 0.0;
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  for (int k = kCfDepth; k >= 1; --k) {
    t = k / (x + t);
    if (k == 3) t3 = t;
    if (k == 2) t2 = t;
    if (k == 1) t1 = t;
  }
  return {t1, t2, t3};
}

// 1 - E'(x), stable in the right tail.
double one_minus_ee1(double x) {
  if (x >= kEeContinuedFractionStart) {
    const CfTails c = cf_tails(x);
    return c.t1 * (c.t2 - c.t1);
  }
  const double e = ee(x);
  return 1.0 - e * (e - x);
}

}  // namespace

double phi(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double Phibar(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_Phibar(double x) {
  if (x < 0.0) return std::log1p(-Phibar(-x));
  if (x < kEeContinuedFractionStart) return std::log(Phibar(x));
  return -0.5 * x * x - kLogSqrt2Pi - std::log(ee(x));
}

double ee(double x) {
  if (x >= kEeContinuedFractionStart) return x + cf_tails(x).t1;
  return phi(x) / Phibar(x);
}

double ee_minus_x(double x) {
  if (x >= kEeContinuedFractionStart) return cf_tails(x).t1;
  return ee(x) - x;
}

double ee_deriv(double x, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("ee_deriv: order must be in 1..4");
  double e, d1, d2, om;
  if (x >= kEeContinuedFractionStart) {
    const CfTails c = cf_tails(x);
    e = x + c.t1;
    om = c.t1 * (c.t2 - c.t1);
    d1 = 1.0 - om;
    d2 = e * c.t1 * c.t1 * c.t2 * (c.t3 - c.t2);
  } else {
    e = ee(x);
    const double r = e - x;
    d1 = e * r;
    om = 1.0 - d1;
    d2 = e * ((2.0 * e - x) * r - 1.0);
  }
  if (order == 1) return d1;
  if (order == 2) return d2;
  const double d3 = -2.0 * om * d1 + (2.0 * e - x) * d2;
  if (order == 3) return d3;
  return d2 * (6.0 * d1 - 3.0) + d3 * (2.0 * e - x);
}

TruncGaussMoments trunc_moments(double xi) {
  TruncGaussMoments m{};
  m.xi = xi;
  m.mean = ee(xi);
  m.second = xi * m.mean + 1.0;
  if (xi >= 0.0) {
    m.abs_first = m.mean;
    m.abs_third = (2.0 + xi * xi) * m.mean;
  } else {
    const double tail = Phibar(xi);
    m.abs_first = (2.0 * kInvSqrt2Pi - phi(xi)) / tail;
    m.abs_third = (4.0 * kInvSqrt2Pi - (xi * xi + 2.0) * phi(xi)) / tail;
  }
  return m;
}

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

double log2cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

double sech2(double x) {
  const double e = std::exp(-2.0 * std::abs(x));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

double L_map(double q, double kappa, double h) {
  const double s = std::sqrt(1.0 - q);
  return h + s * ee((kappa - h) / s);
}

double L_map_deriv(double q, double kappa, double h) {
  const double s = std::sqrt(1.0 - q);
  return one_minus_ee1((kappa - h) / s);
}

double L_inverse(double q, double kappa, double y) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("L_inverse: q must lie in [0,1)");
  if (!(y > kappa)) throw std::domain_error("L_inverse: no solution for y <= kappa");
  const double s = std::sqrt(1.0 - q);
  // L(h) < kappa + s^2/(kappa-h) for h < kappa, so this lower end maps below y.
  double lo = std::min(y - s - std::abs(kappa - y), kappa - 2.0 * s * s / (y - kappa) - 1.0);
  double hi = y;  // L(h) > h
  auto f = [&](double h) { return L_map(q, kappa, h) - y; };
  auto tol = [](double a, double b) {
    const double w = b - a;
    return w <= 5e-13 || w <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
  };
  if (f(hi) == 0.0) return hi;
  std::uintmax_t iters = 400;
  const std::pair<double, double> r = boost::math::tools::bisect(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

double F_q(double q, double kappa, double x) {
  const double s = std::sqrt(1.0 - q);
  return ee((kappa - x) / s) / s;
}

double F_q_deriv(double q, double kappa, double x) {
  const double s = std::sqrt(1.0 - q);
  return -ee_deriv((kappa - x) / s, 1) / (1.0 - q);
}

}  // namespace percap
