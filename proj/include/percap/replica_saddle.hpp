// Replica-symmetric capacity computation: the recursion maps P and R, the
// fixed point (q*, psi*), the free-entropy surface G, the capacity alpha*,
// and the bracketed re-verification of the certified constants table.
#pragma once

#include "percap/quadrature.hpp"

#include <string>
#include <vector>

namespace percap {

struct ModelParams {
  double kappa = 0.0;
  double alpha = 0.833;
};

// Certified enclosures of alpha*, q*(alpha) and psi*(alpha) at kappa = 0.
struct Constants6 {
  double alpha_lb = 0.833078599;
  double alpha_ub = 0.833078600;
  double q_lb = 0.56394907949;
  double q_lu = 0.56394907950;
  double q_ul = 0.56394908029;
  double q_ub = 0.56394908030;
  double psi_lb = 2.5763513100;
  double psi_lu = 2.5763513103;
  double psi_ul = 2.5763513221;
  double psi_ub = 2.5763513224;

  static Constants6 table() { return {}; }
};

struct SaddlePoint {
  double alpha = 0.0;
  double kappa = 0.0;
  double q_star = 0.0;
  double psi_star = 0.0;
  double at_slope = 0.0;  // dP(R(q,alpha))/dq at q*
  double g_star = 0.0;    // G(alpha, q*, psi*)
  double gamma = 0.0;     // sqrt(q*/(1-q*))
  bool certified = false; // alpha inside the certified range, bracket from the table
};

// Integration range for the saddle integrals; the tails beyond it are below 1e-20.
inline constexpr double kSaddleZMax = 10.0;

double gamma_of_q(double q);
// xi = (kappa - sqrt(q) z)/sqrt(1-q) and zeta = (kappa - z/sqrt(q))/sqrt(1-q).
double xi_qz(double q, double kappa, double z);
double zeta_qz(double q, double kappa, double z);

// P(psi) = E tanh(sqrt(psi) Z)^2.
double P_of_psi(double psi);
// P'(psi) = E[3 sech^4 - 2 sech^2](sqrt(psi) Z).
double P_prime(double psi);
// R(q, alpha) = alpha E F_q(sqrt(q) Z)^2.
double R_of_q(double q, const ModelParams& p);
double dR_dq(double q, const ModelParams& p);
// Slope of the composed recursion q -> P(R(q, alpha)).
double recursion_slope(double q, const ModelParams& p);

// G(alpha, q, psi) = -psi(1-q)/2 + E log 2cosh(sqrt(psi) Z) + alpha E log Phibar(xi).
double g_surface(const ModelParams& p, double q, double psi);

struct SaddleOptions {
  double q_tol = 1e-15;  // bisection width in q
};

SaddlePoint solve_saddle(const ModelParams& p, const SaddleOptions& opt = {});

// G at the saddle for the given alpha (kappa = 0 unless stated).
double g_star(double alpha, double kappa = 0.0);

// Bisection of alpha -> G_*(alpha) inside the certified range.
BoundBracket alpha_star(const Constants6& c = Constants6::table(), double width = 1e-12);

// H_* = -psi(1-q) + E log 2cosh(sqrt(psi) Z), and its entropy form
// E h((1 + tanh(sqrt(psi) Z))/2); the two agree at a fixed point.
double h_star(const SaddlePoint& sp);
double h_star_entropy(const SaddlePoint& sp);
// P_* = psi(1-q)/2 + alpha E log Phibar(xi).
double p_star(const SaddlePoint& sp);
// alpha E[E(xi) zeta], equal to psi(1-q) at a fixed point.
double ibp_integral(const SaddlePoint& sp);

// Largest recursion slope over a q-grid spanning [q_lb, q_ub] at alpha_lb,
// the midpoint and alpha_ub.
double at_slope_sup(const Constants6& c = Constants6::table(), int npoints = 512);

struct NamedCheck {
  std::string name;
  double lo = 0.0;  // bracket of the checked quantity
  double hi = 0.0;
  std::string relation;  // "<" or ">"
  double threshold = 0.0;
  bool pass = false;
};

// Builds a check of the bracket [lo, hi] against threshold with relation
// "<", "<=", ">" or ">="; the bracket side that decides is the conservative one.
NamedCheck make_check(std::string name, double lo, double hi, const std::string& relation, double threshold);

struct Section6Options {
  double tol = 1e-15;
  double eps_rig = 1e-14;  // the certified margins are near 1e-12
  int at_grid = 512;
};

struct Section6Report {
  std::vector<NamedCheck> checks;
  bool pass = false;
};

// Bracketed re-verification of the constants table: the mapping endpoints,
// the P' and dR/dq envelopes with their product, the fixed-point sign
// conditions, the G_* sign conditions, and the integration-by-parts identity.
Section6Report check_section6(const Constants6& c = Constants6::table(), const Section6Options& opt = {});

}  // namespace percap
