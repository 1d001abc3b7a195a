// Adaptive Gauss-Kronrod (G10/K21) integration on truncated domains, in a
// plain mode that returns a best-effort value and a bracket mode that
// returns outward-inflated bounds for interval-valued integrands.
//
// The driver is vector-valued so that the lower and upper envelopes of an
// interval integrand share one subdivision. Segments are summed in order of
// their left endpoint, which keeps results independent of the refinement
// history.
#pragma once

#include "percap/interval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace percap {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Gk21Rule {
  std::array<double, 11> x;   // nonnegative Kronrod abscissae, x[0] = 0
  std::array<double, 11> wk;  // Kronrod weights
  std::array<double, 5> wg;   // Gauss weights for x[1], x[3], ..., x[9]
};

const Gk21Rule& gk21_rule();

struct QuadOptions {
  double tol = 1e-12;      // absolute, per component
  int max_segments = 4000;
  int initial_pieces = 4;  // equal pieces between consecutive breakpoints
};

template <std::size_t N>
struct VecQuadResult {
  std::array<double, N> value{};
  std::array<double, N> error{};
  std::size_t evaluations = 0;
};

namespace detail {

template <std::size_t N>
struct Segment {
  double a, b;
  std::array<double, N> value, error, l1;
  double key;
};

template <std::size_t N, class F>
Segment<N> gk21_segment(F& f, double a, double b, std::size_t& evals) {
  const Gk21Rule& r = gk21_rule();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Segment<N> s{a, b, {}, {}, {}, 0.0};
  std::array<double, N> k{}, g{}, l1{};
  const std::array<double, N> fc = f(c);
  for (std::size_t i = 0; i < N; ++i) {
    k[i] = r.wk[0] * fc[i];
    l1[i] = r.wk[0] * std::abs(fc[i]);
  }
  for (int j = 1; j <= 10; ++j) {
    const double dx = h * r.x[j];
    const std::array<double, N> f1 = f(c - dx);
    const std::array<double, N> f2 = f(c + dx);
    for (std::size_t i = 0; i < N; ++i) {
      const double sum = f1[i] + f2[i];
      k[i] += r.wk[j] * sum;
      l1[i] += r.wk[j] * (std::abs(f1[i]) + std::abs(f2[i]));
      if (j % 2 == 1) g[i] += r.wg[(j - 1) / 2] * sum;
    }
  }
  evals += 21;
  double key = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    s.value[i] = h * k[i];
    s.error[i] = h * std::abs(k[i] - g[i]);
    s.l1[i] = std::abs(h) * l1[i];
    if (!std::isfinite(s.value[i])) throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    key = std::max(key, s.error[i]);
  }
  s.key = key;
  return s;
}

}  // namespace detail

// Integrates a vector-valued f over [a,b], splitting first at the given
// breakpoints. Stops once every component's summed error estimate is below
// max(tol, 50 eps * integral of |f|); the second term is the roundoff floor.
template <std::size_t N, class F>
VecQuadResult<N> adaptive_gk21(F&& f, double a, double b, const QuadOptions& opt, const std::vector<double>& breaks = {}) {
  if (!(a < b)) throw std::invalid_argument("adaptive_gk21: need a < b");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("adaptive_gk21: tol must be positive");
  std::vector<double> knots{a};
  for (double x : breaks)
    if (x > a && x < b) knots.push_back(x);
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());

  VecQuadResult<N> out;
  std::vector<detail::Segment<N>> heap;
  auto cmp = [](const detail::Segment<N>& s, const detail::Segment<N>& t) { return s.key < t.key; };
  const int pieces = std::max(1, opt.initial_pieces);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double w = (knots[i + 1] - knots[i]) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double lo = knots[i] + p * w;
      const double hi = (p + 1 == pieces) ? knots[i + 1] : knots[i] + (p + 1) * w;
      heap.push_back(detail::gk21_segment<N>(f, lo, hi, out.evaluations));
    }
  }
  std::make_heap(heap.begin(), heap.end(), cmp);

  constexpr double kFloor = 50.0 * std::numeric_limits<double>::epsilon();
  std::array<double, N> err_sum{}, l1_sum{};
  auto account = [&](const detail::Segment<N>& s, double sign) {
    for (std::size_t i = 0; i < N; ++i) {
      err_sum[i] += sign * s.error[i];
      l1_sum[i] += sign * s.l1[i];
    }
  };
  for (const auto& s : heap) account(s, 1.0);
  auto converged = [&]() {
    for (std::size_t i = 0; i < N; ++i)
      if (err_sum[i] > std::max(opt.tol, kFloor * l1_sum[i])) return false;
    return true;
  };

  while (!converged()) {
    if (static_cast<int>(heap.size()) >= opt.max_segments)
      throw QuadratureError("adaptive_gk21: no convergence within " + std::to_string(opt.max_segments) + " segments on [" +
                            std::to_string(a) + ", " + std::to_string(b) + "]");
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const detail::Segment<N> worst = heap.back();
    heap.pop_back();
    account(worst, -1.0);
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) throw QuadratureError("adaptive_gk21: segment width underflow");
    for (auto [lo, hi] : {std::pair{worst.a, mid}, std::pair{mid, worst.b}}) {
      heap.push_back(detail::gk21_segment<N>(f, lo, hi, out.evaluations));
      account(heap.back(), 1.0);
      std::push_heap(heap.begin(), heap.end(), cmp);
    }
  }

  std::sort(heap.begin(), heap.end(), [](const auto& s, const auto& t) { return s.a < t.a; });
  for (const auto& s : heap)
    for (std::size_t i = 0; i < N; ++i) {
      out.value[i] += s.value[i];
      out.error[i] += s.error[i];
    }
  return out;
}

// Nested integral of f(z, x) over zlo <= z <= zhi, xlo(z) <= x <= xhi(z).
// The inner tolerance is scaled so that inner and outer errors each use
// half of tol; the reported error adds the worst inner error times the
// z-length to the outer estimate.
template <std::size_t N, class F, class XLo, class XHi, class XBreaks>
VecQuadResult<N> adaptive_gk21_2d(F&& f, double zlo, double zhi, XLo&& xlo, XHi&& xhi, XBreaks&& xbreaks, const QuadOptions& opt,
                                  const std::vector<double>& zbreaks = {}) {
  QuadOptions inner = opt;
  inner.tol = 0.5 * opt.tol / (zhi - zlo);
  QuadOptions outer = opt;
  outer.tol = 0.5 * opt.tol;
  std::array<double, N> worst_inner{};
  std::size_t evals = 0;
  auto g = [&](double z) {
    const double a = xlo(z), b = xhi(z);
    std::array<double, N> zero{};
    if (!(a < b)) return zero;
    auto fz = [&](double x) { return f(z, x); };
    const VecQuadResult<N> r = adaptive_gk21<N>(fz, a, b, inner, xbreaks(z));
    evals += r.evaluations;
    for (std::size_t i = 0; i < N; ++i) worst_inner[i] = std::max(worst_inner[i], r.error[i]);
    return r.value;
  };
  VecQuadResult<N> out = adaptive_gk21<N>(g, zlo, zhi, outer, zbreaks);
  for (std::size_t i = 0; i < N; ++i) out.error[i] += (zhi - zlo) * worst_inner[i];
  out.evaluations = evals;
  return out;
}

// Plain mode -----------------------------------------------------------------

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// Integral of f over [a,b] with no weight.
QuadResult integrate_plain(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                           const std::vector<double>& breaks = {});

// Integral of f(z) phi(z) over [zlo, zhi]; splits at 0.
double integrate_gauss(const std::function<double(double)>& f, double zlo = -9.0, double zhi = 9.0, double tol = 1e-12);

// Integral of phi(z) g(z,u) phi(xi+u)/Phibar(xi) over z in [zlo,zhi] and
// u in [0, max(0,-xi) + u_span], xi = xi_of_z(z). The inner weight is the
// density of nu - xi for nu a standard gaussian conditioned on nu >= xi.
double integrate_inner_trunc(const std::function<double(double, double)>& g, const std::function<double(double)>& xi_of_z,
                             double zlo = -9.0, double zhi = 9.0, double u_span = 12.0, double tol = 1e-10);

// Bracket mode ---------------------------------------------------------------

struct BoundBracket {
  double lo = 0.0;
  double hi = 0.0;
  double budget = 0.0;  // tol + rigor gap + declared tail constants

  bool contains(double x) const { return lo <= x && x <= hi; }
  Interval as_interval() const { return {lo, hi}; }
};

struct BracketOptions {
  double tol = 1e-9;      // quadrature tolerance per envelope
  double eps_rig = 1e-9;  // rigor gap for the nonrigorous quadrature
  int max_segments = 4000;
};

class UndeclaredFactor : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Named envelope factors (q, psi, alpha, lambda, ...). Every factor an
// integrand reads must be declared; asking for another one throws.
class ParamBox {
 public:
  ParamBox& set(const std::string& name, Interval value);
  Interval get(const std::string& name) const;
  bool has(const std::string& name) const { return factors_.count(name) != 0; }
  void require(const std::vector<std::string>& names) const;
  const std::map<std::string, Interval>& factors() const { return factors_; }

 private:
  std::map<std::string, Interval> factors_;
};

// Integral over [zlo,zhi] of an interval-valued integrand, returned as
// [int lo - tol - eps_rig - declared, int hi + tol + eps_rig + declared].
BoundBracket integrate_bracket(const std::function<Interval(double)>& f, double zlo, double zhi, const BracketOptions& opt,
                               double declared_budget = 0.0, const std::vector<double>& breaks = {0.0});

// Same over the rectangle [zlo,zhi] x [xlo,xhi].
BoundBracket integrate_bracket_2d(const std::function<Interval(double, double)>& f, double zlo, double zhi, double xlo, double xhi,
                                  const BracketOptions& opt, double declared_budget = 0.0, const std::vector<double>& zbreaks = {0.0});

}  // namespace percap
