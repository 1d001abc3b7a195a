// Overlap-dependent exponents of the second moment: the two-spin pair law
// and its entropy, the overlap map ell(A) with its (tau, A, lambda)
// parametrization, and the entropy, constraint and tilt exponents H, P, B,
// A, Q as functions of the overlap lambda. All of them are pinned to a
// solved saddle point.
#pragma once

#include "percap/replica_saddle.hpp"

#include <array>
#include <vector>

namespace percap {

// Tilted pair algebra at field H and tilt A > 0, with m = tanh H:
// Delta = sqrt(A^2 + m^2 - A^2 m^2), B the companion tilt, S = B^{-sgn H},
// D the correlation excess selected by A.
struct PairAlgebra {
  double m = 0.0;
  double Delta = 0.0;
  double B = 1.0;
  double S = 1.0;
  double D = 0.0;
};

PairAlgebra pair_algebra(double H, double A);
double D_of(double H, double A);
double dD_dA(double H, double A);

// Two-spin law with equal marginals (1+m)/2 and correlation excess D.
struct PairLaw {
  double H = 0.0;
  double m = 0.0;
  double p = 0.5;
  double D = 0.0;
  std::array<double, 4> cells{};  // (+,+), (+,-), (-,+), (-,-)
};

// Nonnegativity band -(1-|m|)^2 <= D <= 1 - m^2.
double band_lo(double H);
double band_hi(double H);
// Rejects D outside the band by more than 1e-14 and clamps within.
PairLaw pair_law(double H, double D);
// Shannon entropy of the pair law in nats.
double gamma_entropy(double H, double D);
// Closed-form partial derivatives of Gamma in D and in m.
double dGamma_dD(double H, double D);
double dGamma_dm(double H, double D);

struct OverlapPoint {
  double lambda = 0.0;
  double tau = 0.0;
  double A = 1.0;  // exp(2 atanh tau); +inf at tau = 1
};

double A_of_tau(double tau);
double tau_of_A(double A);

// ell(A) = E D_{sqrt(psi) Z}(A)/(1-q); increasing from lambda_min to 1.
double ell(double A, const SaddlePoint& sp);
double ell_prime(double A, const SaddlePoint& sp);
double lambda_min(const SaddlePoint& sp);
OverlapPoint overlap_from_tau(double tau, const SaddlePoint& sp);
// Bisection in tau; |lambda - ell(A)| <= 1e-10.
OverlapPoint ell_inverse(double lambda, const SaddlePoint& sp);

// Entropy exponent as a function of the tilt: -2 H_* + E Gamma(H, D_H(A)).
double entropy_of_A(double A, const SaddlePoint& sp);
double H_of_lambda(const OverlapPoint& pt, const SaddlePoint& sp);
// order 1: -(1-q) log(A)/2; order 2: -(1-q)/(2 A ell'(A)).
double H_deriv(const OverlapPoint& pt, const SaddlePoint& sp, int order);

struct ExponentOptions {
  double tol = 1e-11;     // absolute tolerance of the double integrals
  double u_span = 12.0;   // inner truncation beyond max(0, -xi)
  double s_bracket = 5.0; // initial search range for the tilt minimizer
};

// Constraint integral I_s(lambda) with the threshold xi = (kappa - sqrt(q) z)/sqrt(1-q).
double I_s(double lambda, double s, const SaddlePoint& sp, const ExponentOptions& opt = {});
// The same integral at kappa = 0 written with the threshold gamma z.
double I_s_gamma_form(double lambda, double s, const SaddlePoint& sp, const ExponentOptions& opt = {});
// d I_s / d s, by differentiating under the integral.
double dI_ds(double lambda, double s, const SaddlePoint& sp, const ExponentOptions& opt = {});

double P_of_lambda(double lambda, const SaddlePoint& sp, const ExponentOptions& opt = {});
double B_fn(double lambda, double s, const SaddlePoint& sp, const ExponentOptions& opt = {});

struct TiltMin {
  double value = 0.0;
  double s_opt = 0.0;
};
// inf_s B(lambda, s) by Brent's method on the convex s-profile.
TiltMin A_fn(double lambda, const SaddlePoint& sp, const ExponentOptions& opt = {});
// Upper bound for P + A obtained by fixing the tilt at s = 0.2.
double Q_fn(double lambda, const SaddlePoint& sp, const ExponentOptions& opt = {});

struct ExponentSample {
  double lambda = 0.0;
  double H_val = 0.0;
  double P_val = 0.0;
  double A_val = 0.0;
  double S_val = 0.0;  // H + P + A
  double s_opt = 0.0;
  double S_P = 0.0;    // H + P
  double S_Q = 0.0;    // H + Q
};

// lambda = 1 is evaluated by the closed forms H(1) = -H_*, P(1) = -P_*, A(1) = 0.
ExponentSample exponent_sample(double lambda, const SaddlePoint& sp, const ExponentOptions& opt = {});
std::vector<ExponentSample> S_curves(const std::vector<double>& grid, const SaddlePoint& sp, const ExponentOptions& opt = {});

}  // namespace percap
