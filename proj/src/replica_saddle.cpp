#include "percap/replica_saddle.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace percap {

namespace {

constexpr double kTol = 1e-15;
// Gaussian tail beyond |z| = 10 of every saddle integrand, see the R tail bound below.
constexpr double kTail = 1e-20;

double gauss10(const std::function<double(double)>& f) { return integrate_gauss(f, -kSaddleZMax, kSaddleZMax, kTol); }

template <class F>
std::pair<double, double> bisect_root(F&& f, double lo, double hi, double width) {
  auto tol = [width](double a, double b) { return std::abs(b - a) <= width; };
  std::uintmax_t iters = 200;
  return boost::math::tools::bisect(f, lo, hi, tol, iters);
}

}  // namespace

double gamma_of_q(double q) { return std::sqrt(q / (1.0 - q)); }

double xi_qz(double q, double kappa, double z) { return (kappa - std::sqrt(q) * z) / std::sqrt(1.0 - q); }

double zeta_qz(double q, double kappa, double z) { return (kappa - z / std::sqrt(q)) / std::sqrt(1.0 - q); }

double P_of_psi(double psi) {
  if (!(psi >= 0.0)) throw std::invalid_argument("P_of_psi: psi must be nonnegative");
  const double s = std::sqrt(psi);
  return gauss10([s](double z) {
    const double t = std::tanh(s * z);
    return t * t;
  });
}

double P_prime(double psi) {
  if (!(psi >= 0.0)) throw std::invalid_argument("P_prime: psi must be nonnegative");
  const double s = std::sqrt(psi);
  return gauss10([s](double z) {
    const double u = sech2(s * z);
    return 3.0 * u * u - 2.0 * u;
  });
}

double R_of_q(double q, const ModelParams& p) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("R_of_q: q must lie in [0,1)");
  return p.alpha / (1.0 - q) * gauss10([&](double z) {
           const double e = ee(xi_qz(q, p.kappa, z));
           return e * e;
         });
}

double dR_dq(double q, const ModelParams& p) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("dR_dq: q must lie in (0,1)");
  const double cross = gauss10([&](double z) {
    const double xi = xi_qz(q, p.kappa, z);
    return ee(xi) * ee_deriv(xi, 1) * zeta_qz(q, p.kappa, z);
  });
  return R_of_q(q, p) / (1.0 - q) + p.alpha / ((1.0 - q) * (1.0 - q)) * cross;
}

double recursion_slope(double q, const ModelParams& p) { return P_prime(R_of_q(q, p)) * dR_dq(q, p); }

double g_surface(const ModelParams& p, double q, double psi) {
  if (!(q >= 0.0 && q < 1.0) || !(psi >= 0.0)) throw std::invalid_argument("g_surface: need q in [0,1), psi >= 0");
  const double s = std::sqrt(psi);
  const double ent = gauss10([s](double z) { return log2cosh(s * z); });
  const double con = gauss10([&](double z) { return log_Phibar(xi_qz(q, p.kappa, z)); });
  return -0.5 * psi * (1.0 - q) + ent + p.alpha * con;
}

SaddlePoint solve_saddle(const ModelParams& p, const SaddleOptions& opt) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) throw std::invalid_argument("solve_saddle: alpha must be positive");
  if (!std::isfinite(p.kappa)) throw std::invalid_argument("solve_saddle: kappa must be finite");
  const Constants6 c = Constants6::table();
  auto f = [&](double q) { return P_of_psi(R_of_q(q, p)) - q; };

  SaddlePoint sp;
  sp.alpha = p.alpha;
  sp.kappa = p.kappa;
  double lo = 0.0, hi = 0.0;
  if (p.kappa == 0.0 && p.alpha >= c.alpha_lb && p.alpha <= c.alpha_ub) {
    lo = c.q_lb;
    hi = c.q_ub;
    if (!(f(lo) > 0.0 && f(hi) < 0.0)) throw std::runtime_error("solve_saddle: no sign change on the certified q bracket");
    sp.certified = true;
  } else {
    // Damped fixed-point iteration, halving the step whenever it oscillates.
    double q = 0.5, omega = 1.0, prev = 0.0;
    for (int k = 0; k < 20000; ++k) {
      const double step = f(q);
      if (std::abs(step) < 1e-10) break;
      if (k > 0 && step * prev < 0.0 && std::abs(step) > 0.5 * std::abs(prev)) omega *= 0.5;
      q = std::clamp(q + omega * step, 1e-12, 1.0 - 1e-12);
      prev = step;
    }
    double w = 1e-6;
    lo = std::max(q - w, 1e-13);
    hi = std::min(q + w, 1.0 - 1e-13);
    int expand = 0;
    while (!(f(lo) > 0.0 && f(hi) < 0.0)) {
      if (++expand > 40) throw std::runtime_error("solve_saddle: could not bracket the fixed point");
      w *= 2.0;
      lo = std::max(q - w, 1e-13);
      hi = std::min(q + w, 1.0 - 1e-13);
    }
  }
  const auto r = bisect_root(f, lo, hi, opt.q_tol);
  sp.q_star = 0.5 * (r.first + r.second);
  sp.psi_star = R_of_q(sp.q_star, p);
  sp.gamma = gamma_of_q(sp.q_star);
  sp.at_slope = recursion_slope(sp.q_star, p);
  sp.g_star = g_surface(p, sp.q_star, sp.psi_star);
  return sp;
}

double g_star(double alpha, double kappa) { return solve_saddle({kappa, alpha}).g_star; }

BoundBracket alpha_star(const Constants6& c, double width) {
  double lo = c.alpha_lb, hi = c.alpha_ub;
  if (!(g_star(lo) > 0.0 && g_star(hi) < 0.0)) throw std::runtime_error("alpha_star: G_* has no sign change on the certified range");
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g_star(mid) > 0.0 ? lo : hi) = mid;
  }
  return {lo, hi, hi - lo};
}

double h_star(const SaddlePoint& sp) {
  const double s = std::sqrt(sp.psi_star);
  return -sp.psi_star * (1.0 - sp.q_star) + gauss10([s](double z) { return log2cosh(s * z); });
}

double h_star_entropy(const SaddlePoint& sp) {
  const double s = std::sqrt(sp.psi_star);
  return gauss10([s](double z) {
    // (1 - tanh x)/2 = e^{-x}/(2cosh x), kept accurate when tanh x is near 1.
    const double x = s * z;
    const double p_small = 1.0 / (1.0 + std::exp(2.0 * std::abs(x)));
    return binary_entropy(p_small);
  });
}

double p_star(const SaddlePoint& sp) {
  const double con = gauss10([&](double z) { return log_Phibar(xi_qz(sp.q_star, sp.kappa, z)); });
  return 0.5 * sp.psi_star * (1.0 - sp.q_star) + sp.alpha * con;
}

double ibp_integral(const SaddlePoint& sp) {
  return sp.alpha * gauss10([&](double z) { return ee(xi_qz(sp.q_star, sp.kappa, z)) * zeta_qz(sp.q_star, sp.kappa, z); });
}

double at_slope_sup(const Constants6& c, int npoints) {
  if (npoints < 2) throw std::invalid_argument("at_slope_sup: need at least two grid points");
  double sup = -INFINITY;
  for (double alpha : {c.alpha_lb, 0.5 * (c.alpha_lb + c.alpha_ub), c.alpha_ub}) {
    const ModelParams p{0.0, alpha};
    for (int i = 0; i < npoints; ++i) {
      const double q = c.q_lb + (c.q_ub - c.q_lb) * i / (npoints - 1);
      sup = std::max(sup, recursion_slope(q, p));
    }
  }
  return sup;
}

namespace {

struct Sec6Ctx {
  const Constants6& c;
  BracketOptions opt;
};

BoundBracket R_bracket(const Sec6Ctx& x, double q, double alpha) {
  auto f = [&](double z) {
    const double e = ee(xi_qz(q, 0.0, z));
    return Interval::point(alpha * e * e / (1.0 - q) * phi(z));
  };
  return integrate_bracket(f, -kSaddleZMax, kSaddleZMax, x.opt, kTail);
}

BoundBracket P_bracket(const Sec6Ctx& x, double psi) {
  const double s = std::sqrt(psi);
  auto f = [&](double z) {
    const double t = std::tanh(s * z);
    return Interval::point(t * t * phi(z));
  };
  return integrate_bracket(f, -kSaddleZMax, kSaddleZMax, x.opt, kTail);
}

BoundBracket logcosh_bracket(const Sec6Ctx& x, double psi) {
  const double s = std::sqrt(psi);
  return integrate_bracket([&](double z) { return Interval::point(log2cosh(s * z) * phi(z)); }, -kSaddleZMax, kSaddleZMax, x.opt, kTail);
}

BoundBracket logphibar_bracket(const Sec6Ctx& x, double q) {
  return integrate_bracket([&](double z) { return Interval::point(log_Phibar(xi_qz(q, 0.0, z)) * phi(z)); }, -kSaddleZMax, kSaddleZMax,
                           x.opt, kTail);
}


}  // namespace

NamedCheck make_check(std::string name, double lo, double hi, const std::string& rel, double thr) {
  NamedCheck k{std::move(name), lo, hi, rel, thr, false};
  if (rel == "<") k.pass = hi < thr;
  else if (rel == "<=") k.pass = hi <= thr;
  else if (rel == ">") k.pass = lo > thr;
  else if (rel == ">=") k.pass = lo >= thr;
  else throw std::invalid_argument("make_check: unknown relation " + rel);
  return k;
}

Section6Report check_section6(const Constants6& c, const Section6Options& o) {
  Sec6Ctx x{c, BracketOptions{o.tol, o.eps_rig, 4000}};
  Section6Report rep;
  auto add = [&](NamedCheck k) { rep.checks.push_back(std::move(k)); };

  // Mapping of the q-boxes into the psi-boxes; R is nondecreasing in q and alpha.
  {
    const BoundBracket a_lo = R_bracket(x, c.q_lb, c.alpha_lb);
    const BoundBracket a_hi = R_bracket(x, c.q_lu, c.alpha_lb);
    const BoundBracket b_lo = R_bracket(x, c.q_ul, c.alpha_ub);
    const BoundBracket b_hi = R_bracket(x, c.q_ub, c.alpha_ub);
    add(make_check("R(q_lb, alpha_lb) > psi_lb", a_lo.lo, a_lo.hi, ">", c.psi_lb));
    add(make_check("R(q_lu, alpha_lb) < psi_lu", a_hi.lo, a_hi.hi, "<", c.psi_lu));
    add(make_check("R(q_ul, alpha_ub) > psi_ul", b_lo.lo, b_lo.hi, ">", c.psi_ul));
    add(make_check("R(q_ub, alpha_ub) < psi_ub", b_hi.lo, b_hi.hi, "<", c.psi_ub));
  }
  // Closed-form tail of R beyond |z| = 10 using E(x) <= 1 + |x|.
  {
    const double q = c.q_ub, a = c.alpha_ub;
    const double tail = 2.0 * a / (1.0 - q) *
                        (Phibar(10.0) + 2.0 * std::sqrt(q) * phi(10.0) / std::sqrt(1.0 - q) + q * (10.0 * phi(10.0) + Phibar(10.0)) / (1.0 - q));
    add(make_check("R tail beyond |z|=10 < 1e-20", tail, tail, "<", 1e-20));
  }
  // P' envelope over psi in [psi_lb, psi_ub]: both pieces are nonincreasing in psi.
  double pprime_hi = 0.0;
  {
    const double sl = std::sqrt(c.psi_lb), su = std::sqrt(c.psi_ub);
    auto f = [&](double z) {
      const double ul = sech2(sl * z), uu = sech2(su * z);
      const double v = 2.0 * ul * ul - (2.0 * uu - uu * uu);
      return Interval::point(v * phi(z));
    };
    const BoundBracket b = integrate_bracket(f, -kSaddleZMax, kSaddleZMax, x.opt, kTail);
    pprime_hi = b.hi;
    add(make_check("P' envelope <= 0.08", b.lo, b.hi, "<=", 0.08));
  }
  // dR/dq envelope over q in [q_lb, q_ub], alpha <= alpha_ub.
  double drdq_hi = 0.0;
  {
    const Interval Q{c.q_lb, c.q_ub};
    const Interval sq = isqrt(Q), s1 = isqrt(1.0 - Q);
    auto f = [&](double z) {
      const Interval xi = (0.0 - sq * z) / s1;
      const Interval zeta = (0.0 - z / sq) / s1;
      return iee(xi) * iee1(xi) * zeta * phi(z);
    };
    const BoundBracket cross = integrate_bracket(f, -kSaddleZMax, kSaddleZMax, x.opt, kTail);
    const BoundBracket r = R_bracket(x, c.q_ub, c.alpha_ub);
    const Interval scale = Interval{c.alpha_lb, c.alpha_ub} / isqr(1.0 - Q);
    const Interval total = Interval{r.lo, r.hi} / (1.0 - Q) + scale * cross.as_interval();
    drdq_hi = total.hi;
    add(make_check("dR/dq envelope <= 12", total.lo, total.hi, "<=", 12.0));
  }
  add(make_check("AT slope envelope product <= 0.96", pprime_hi * drdq_hi, pprime_hi * drdq_hi, "<=", 0.96));
  {
    const double sup = at_slope_sup(c, o.at_grid);
    add(make_check("AT slope grid sup <= 0.96", sup, sup, "<=", 0.96));
  }
  // Fixed-point sign conditions; P is nondecreasing so brackets compose.
  {
    auto comp = [&](double q, double alpha) {
      const BoundBracket r = R_bracket(x, q, alpha);
      return Interval{P_bracket(x, r.lo).lo - q, P_bracket(x, r.hi).hi - q};
    };
    const Interval a1 = comp(c.q_lb, c.alpha_lb), a2 = comp(c.q_lu, c.alpha_lb);
    const Interval b1 = comp(c.q_ul, c.alpha_ub), b2 = comp(c.q_ub, c.alpha_ub);
    add(make_check("P(R(q_lb, alpha_lb)) - q_lb > 0", a1.lo, a1.hi, ">", 0.0));
    add(make_check("P(R(q_lu, alpha_lb)) - q_lu < 0", a2.lo, a2.hi, "<", 0.0));
    add(make_check("P(R(q_ul, alpha_ub)) - q_ul > 0", b1.lo, b1.hi, ">", 0.0));
    add(make_check("P(R(q_ub, alpha_ub)) - q_ub < 0", b2.lo, b2.hi, "<", 0.0));
  }
  // G_* signs at the ends of the alpha range, bounding each term of G by monotonicity.
  {
    const BoundBracket ent_u = logcosh_bracket(x, c.psi_ub);
    const BoundBracket con_u = logphibar_bracket(x, c.q_ul);
    const double upper = -0.5 * c.psi_ul * (1.0 - c.q_ub) + ent_u.hi + c.alpha_ub * con_u.hi;
    add(make_check("G_*(alpha_ub) < -1e-12", upper, upper, "<", -1e-12));
    const BoundBracket ent_l = logcosh_bracket(x, c.psi_lb);
    const BoundBracket con_l = logphibar_bracket(x, c.q_lu);
    const double lower = -0.5 * c.psi_lu * (1.0 - c.q_lb) + ent_l.lo + c.alpha_lb * con_l.lo;
    add(make_check("G_*(alpha_lb) > 1e-12", lower, lower, ">", 1e-12));
  }
  // Integration-by-parts identity at the solved saddle.
  {
    const SaddlePoint sp = solve_saddle({0.0, 0.5 * (c.alpha_lb + c.alpha_ub)});
    const double gap = std::abs(ibp_integral(sp) - sp.psi_star * (1.0 - sp.q_star));
    add(make_check("|I - psi(1-q)| < 1e-9 at the saddle", gap, gap, "<", 1e-9));
  }
  rep.pass = true;
  for (const auto& k : rep.checks) rep.pass = rep.pass && k.pass;
  return rep;
}

}  // namespace percap
