#include "percap/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace percap {

const Gk21Rule& gk21_rule() {
  static const Gk21Rule rule = [] {
    Gk21Rule r{};
    const auto& kx = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
    const auto& kw = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
    const auto& gw = boost::math::quadrature::gauss<double, 10>::weights();
    for (std::size_t i = 0; i < 11; ++i) {
      r.x[i] = kx[i];
      r.wk[i] = kw[i];
    }
    // Boost lists the Gauss nodes of the 10-point rule as the odd Kronrod nodes.
    for (std::size_t i = 0; i < 5; ++i) r.wg[i] = gw[i];
    return r;
  }();
  return rule;
}

QuadResult integrate_plain(const std::function<double(double)>& f, double a, double b, double tol, const std::vector<double>& breaks) {
  QuadOptions opt;
  opt.tol = tol;
  auto g = [&](double x) { return std::array<double, 1>{f(x)}; };
  const VecQuadResult<1> r = adaptive_gk21<1>(g, a, b, opt, breaks);
  return {r.value[0], r.error[0]};
}

double integrate_gauss(const std::function<double(double)>& f, double zlo, double zhi, double tol) {
  return integrate_plain([&](double z) { return f(z) * phi(z); }, zlo, zhi, tol, {0.0}).value;
}

double integrate_inner_trunc(const std::function<double(double, double)>& g, const std::function<double(double)>& xi_of_z, double zlo,
                             double zhi, double u_span, double tol) {
  QuadOptions opt;
  opt.tol = tol;
  // The conditional density of u = nu - xi is E(xi) exp(-xi u - u^2/2) on u >= 0.
  auto f = [&](double z, double u) {
    const double xi = xi_of_z(z);
    return std::array<double, 1>{phi(z) * g(z, u) * ee(xi) * std::exp(-xi * u - 0.5 * u * u)};
  };
  auto ulo = [](double) { return 0.0; };
  auto uhi = [&](double z) { return std::max(0.0, -xi_of_z(z)) + u_span; };
  auto ubreaks = [&](double z) {
    const double xi = xi_of_z(z);
    return xi < 0.0 ? std::vector<double>{-xi} : std::vector<double>{};
  };
  return adaptive_gk21_2d<1>(f, zlo, zhi, ulo, uhi, ubreaks, opt, {0.0}).value[0];
}

ParamBox& ParamBox::set(const std::string& name, Interval value) {
  if (!(value.lo <= value.hi)) throw std::invalid_argument("ParamBox: factor '" + name + "' has lo > hi");
  factors_[name] = value;
  return *this;
}

Interval ParamBox::get(const std::string& name) const {
  const auto it = factors_.find(name);
  if (it == factors_.end()) throw UndeclaredFactor("ParamBox: factor '" + name + "' was not declared");
  return it->second;
}

void ParamBox::require(const std::vector<std::string>& names) const {
  for (const auto& n : names) (void)get(n);
}

namespace {

BoundBracket inflate(const VecQuadResult<2>& r, const BracketOptions& opt, double declared) {
  const double slack_lo = std::max(opt.tol, r.error[0]) + opt.eps_rig + declared;
  const double slack_hi = std::max(opt.tol, r.error[1]) + opt.eps_rig + declared;
  BoundBracket b;
  b.lo = r.value[0] - slack_lo;
  b.hi = r.value[1] + slack_hi;
  b.budget = opt.tol + opt.eps_rig + declared;
  if (!(b.lo <= b.hi)) throw QuadratureError("integrate_bracket: envelope inversion (lo > hi)");
  return b;
}

}  // namespace

BoundBracket integrate_bracket(const std::function<Interval(double)>& f, double zlo, double zhi, const BracketOptions& opt,
                               double declared_budget, const std::vector<double>& breaks) {
  QuadOptions q;
  q.tol = opt.tol;
  q.max_segments = opt.max_segments;
  auto g = [&](double z) {
    const Interval v = f(z);
    return std::array<double, 2>{v.lo, v.hi};
  };
  return inflate(adaptive_gk21<2>(g, zlo, zhi, q, breaks), opt, declared_budget);
}

BoundBracket integrate_bracket_2d(const std::function<Interval(double, double)>& f, double zlo, double zhi, double xlo, double xhi,
                                  const BracketOptions& opt, double declared_budget, const std::vector<double>& zbreaks) {
  QuadOptions q;
  q.tol = opt.tol;
  q.max_segments = opt.max_segments;
  auto g = [&](double z, double x) {
    const Interval v = f(z, x);
    return std::array<double, 2>{v.lo, v.hi};
  };
  auto lo = [&](double) { return xlo; };
  auto hi = [&](double) { return xhi; };
  auto br = [](double) { return std::vector<double>{}; };
  return inflate(adaptive_gk21_2d<2>(g, zlo, zhi, lo, hi, br, q, zbreaks), opt, declared_budget);
}

}  // namespace percap
