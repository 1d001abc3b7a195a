// Closed real intervals with natural-extension arithmetic, used to carry
// the (q, psi, alpha, lambda, ...) envelopes through the verifier
// integrands. Rounding is to nearest; the verifier's rigor gap absorbs it.
#pragma once

#include "percap/scalar_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace percap {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double x) { return {x, x}; }
  static Interval hull(double a, double b) { return {std::min(a, b), std::max(a, b)}; }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
};

inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }
inline Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator-(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval operator+(Interval a, double b) { return {a.lo + b, a.hi + b}; }
inline Interval operator+(double a, Interval b) { return b + a; }
inline Interval operator-(Interval a, double b) { return {a.lo - b, a.hi - b}; }
inline Interval operator-(double a, Interval b) { return {a - b.hi, a - b.lo}; }

inline Interval operator*(Interval a, Interval b) {
  const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}
inline Interval operator*(Interval a, double b) {
  return b >= 0.0 ? Interval{a.lo * b, a.hi * b} : Interval{a.hi * b, a.lo * b};
}
inline Interval operator*(double a, Interval b) { return b * a; }

inline Interval operator/(Interval a, Interval b) {
  if (b.lo <= 0.0 && b.hi >= 0.0) throw std::domain_error("interval division by an interval containing 0");
  return a * Interval{1.0 / b.hi, 1.0 / b.lo};
}
inline Interval operator/(Interval a, double b) { return a * (1.0 / b); }
inline Interval operator/(double a, Interval b) { return Interval::point(a) / b; }

inline Interval join(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

// Image of a nondecreasing (resp. nonincreasing) function.
template <class F>
Interval map_increasing(F&& f, Interval a) {
  return {f(a.lo), f(a.hi)};
}
template <class F>
Interval map_decreasing(F&& f, Interval a) {
  return {f(a.hi), f(a.lo)};
}

inline Interval iabs(Interval a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return -a;
  return {0.0, std::max(-a.lo, a.hi)};
}

inline Interval isqr(Interval a) {
  const Interval m = iabs(a);
  return {m.lo * m.lo, m.hi * m.hi};
}

inline Interval isqrt(Interval a) {
  if (a.lo < 0.0) throw std::domain_error("isqrt of an interval reaching below 0");
  return {std::sqrt(a.lo), std::sqrt(a.hi)};
}

inline Interval iexp(Interval a) { return {std::exp(a.lo), std::exp(a.hi)}; }

inline Interval ilog(Interval a) {
  if (a.lo <= 0.0) throw std::domain_error("ilog of a nonpositive interval");
  return {std::log(a.lo), std::log(a.hi)};
}

inline Interval itanh(Interval a) { return {std::tanh(a.lo), std::tanh(a.hi)}; }

// Functions of |x| that decrease away from 0.
template <class F>
Interval map_even_decreasing(F&& f, Interval a) {
  const Interval m = iabs(a);
  return {f(m.hi), f(m.lo)};
}

inline Interval iphi(Interval a) { return map_even_decreasing([](double x) { return phi(x); }, a); }
inline Interval isech2(Interval a) { return map_even_decreasing([](double x) { return sech2(x); }, a); }

inline Interval iPhibar(Interval a) { return map_decreasing([](double x) { return Phibar(x); }, a); }
inline Interval ilog_Phibar(Interval a) { return map_decreasing([](double x) { return log_Phibar(x); }, a); }
// E and E' are both increasing.
inline Interval iee(Interval a) { return map_increasing([](double x) { return ee(x); }, a); }
inline Interval iee1(Interval a) { return map_increasing([](double x) { return ee_deriv(x, 1); }, a); }

// -p log p on p >= 0, maximal at p = 1/e.
inline Interval ineg_xlogx(Interval p) {
  auto f = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
  const double lo = std::max(p.lo, 0.0);
  const double hi = std::max(p.hi, 0.0);
  const double a = f(lo), b = f(hi);
  constexpr double kInvE = 0.36787944117144233;
  const double top = (lo <= kInvE && kInvE <= hi) ? kInvE : std::max(a, b);
  return {std::min(a, b), top};
}

}  // namespace percap
