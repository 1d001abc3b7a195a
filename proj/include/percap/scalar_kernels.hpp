// Gaussian density and tail, the hazard function E(x) = phi(x)/Phibar(x)
// with its first four derivatives, truncated-Gaussian moments, and the
// monotone map L used to solve the perturbed fixed point.
#pragma once

#include <stdexcept>

namespace percap {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Above this threshold E is evaluated by its continued fraction.
inline constexpr double kEeContinuedFractionStart = 30.0;

double phi(double x);
double Phibar(double x);
// log Phibar(x), accurate in both tails.
double log_Phibar(double x);

// E(x) = phi(x)/Phibar(x); max{0,x} < E(x) < 1+|x|.
double ee(double x);
// E(x) - x without cancellation for large x.
double ee_minus_x(double x);
// Derivatives of E by the closed recurrences; order in 1..4.
double ee_deriv(double x, int order);

struct TruncGaussMoments {
  double xi;
  double mean;       // E(xi)
  double second;     // xi E(xi) + 1
  double abs_first;  // E|nu| under nu >= xi
  double abs_third;  // E|nu|^3 under nu >= xi
};

TruncGaussMoments trunc_moments(double xi);

// Binary entropy in nats with 0 log 0 = 0.
double binary_entropy(double p);
// log(2 cosh x) without overflow.
double log2cosh(double x);
// 1 - tanh(x)^2 without cancellation.
double sech2(double x);

// L(h) = h + sqrt(1-q) E((kappa-h)/sqrt(1-q)), strictly increasing onto
// (kappa, inf).
double L_map(double q, double kappa, double h);
// Derivative of L with respect to h; lies in (0,1).
double L_map_deriv(double q, double kappa, double h);
// Unique h with L(h) = y; requires y > kappa. |L(h) - y| <= 1e-12.
double L_inverse(double q, double kappa, double y);

// F_q(x) = E((kappa-x)/sqrt(1-q))/sqrt(1-q).
double F_q(double q, double kappa, double x);
// dF_q/dx = -E'((kappa-x)/sqrt(1-q))/(1-q).
double F_q_deriv(double q, double kappa, double x);

}  // namespace percap
