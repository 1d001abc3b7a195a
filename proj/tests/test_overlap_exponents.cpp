#include "percap/overlap_exponents.hpp"

#include <doctest.h>

#include <cmath>

using namespace percap;

namespace {
const SaddlePoint& saddle() {
  static const SaddlePoint sp = solve_saddle({0.0, 0.833});
  return sp;
}
}  // namespace

TEST_CASE("pair algebra at zero field and unit tilt") {
  for (double A : {0.1, 0.5, 1.0, 3.0, 40.0}) {
    const PairAlgebra pa = pair_algebra(0.0, A);
    CHECK(pa.B == doctest::Approx(1.0));
    CHECK(pa.S == doctest::Approx(1.0));
    CHECK(pa.D == doctest::Approx((A - 1) / (A + 1)).epsilon(1e-13));
  }
  for (double H : {-2.0, -0.4, 0.3, 1.7}) {
    const double m = std::tanh(H);
    CHECK(std::abs(D_of(H, 1.0)) < 1e-15);
    CHECK(dD_dA(H, 1.0) == doctest::Approx((1 - m * m) * (1 - m * m) / 2).epsilon(1e-10));
  }
}

TEST_CASE("conjugate root leaves the nonnegativity band") {
  for (double H : {-1.5, -0.3, 0.2, 0.9, 2.0})
    for (double A : {0.2, 0.6, 1.7, 5.0}) {
      const double m = std::tanh(H);
      const double D = D_of(H, A);
      CHECK(D >= band_lo(H) - 1e-14);
      CHECK(D <= band_hi(H) + 1e-14);
      const double conj = (1 - m * m) * (1 - m * m) / D;
      CHECK((conj < band_lo(H) || conj > band_hi(H)));
    }
}

TEST_CASE("pair law is a probability measure with equal marginals") {
  for (double H : {-2.0, -0.5, 0.0, 0.8})
    for (double A : {0.05, 0.7, 1.0, 2.5, 30.0}) {
      const PairLaw pl = pair_law(H, D_of(H, A));
      double s = 0.0;
      for (double c : pl.cells) {
        CHECK(c >= 0.0);
        s += c;
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(pl.cells[0] + pl.cells[1] == doctest::Approx((1 + pl.m) / 2).epsilon(1e-14));
      CHECK(pl.cells[0] + pl.cells[2] == doctest::Approx((1 + pl.m) / 2).epsilon(1e-14));
    }
  CHECK_THROWS(pair_law(0.5, 2.0));
}

TEST_CASE("pair entropy limits") {
  for (double H : {-1.0, 0.0, 0.4, 1.3}) {
    const double p = (1 + std::tanh(H)) / 2;
    CHECK(gamma_entropy(H, 0.0) == doctest::Approx(2 * binary_entropy(p)).epsilon(1e-13));
    CHECK(gamma_entropy(H, band_hi(H)) == doctest::Approx(binary_entropy(p)).epsilon(1e-12));
  }
}

TEST_CASE("pair entropy stationarity") {
  const double h = 1e-6;
  for (double H : {-1.2, 0.3, 0.9})
    for (double A : {0.3, 1.0, 2.0, 6.0}) {
      const double D = D_of(H, A);
      const double fd = (gamma_entropy(H, D + h) - gamma_entropy(H, D - h)) / (2 * h);
      CHECK(std::abs(fd + std::log(A) / 2) < 1e-6);
      CHECK(std::abs(dGamma_dD(H, D) + std::log(A) / 2) < 1e-6);
      // dGamma/dm at fixed D, via H with dm/dH = sech^2 H.
      const double fdm = (gamma_entropy(H + h, D) - gamma_entropy(H - h, D)) / (2 * h) / sech2(H);
      CHECK(std::abs(dGamma_dm(H, D) - fdm) < 1e-6);
    }
}

TEST_CASE("field-flip symmetry") {
  for (double H : {0.2, 0.7, 1.9})
    for (double A : {0.4, 3.0}) {
      CHECK(D_of(H, A) == doctest::Approx(D_of(-H, A)).epsilon(1e-13));
      CHECK(gamma_entropy(H, D_of(H, A)) == doctest::Approx(gamma_entropy(-H, D_of(-H, A))).epsilon(1e-13));
    }
}

TEST_CASE("tau and A bijection") {
  for (double tau = -0.95; tau <= 0.95; tau += 0.05) CHECK(tau_of_A(A_of_tau(tau)) == doctest::Approx(tau).epsilon(1e-13));
  CHECK(A_of_tau(0.0) == 1.0);
}

TEST_CASE("overlap map") {
  const SaddlePoint& sp = saddle();
  CHECK(std::abs(ell(1.0, sp)) < 1e-12);
  CHECK(lambda_min(sp) == doctest::Approx(-0.424).epsilon(0.002 / 0.424));
  CHECK(std::abs(ell(1e8, sp) - 1.0) < 1e-6);
  double prev = ell(A_of_tau(-0.99), sp);
  for (double tau = -0.95; tau <= 0.95; tau += 0.05) {
    const double l = ell(A_of_tau(tau), sp);
    CHECK(l > prev);
    prev = l;
    const OverlapPoint pt = ell_inverse(l, sp);
    CHECK(std::abs(pt.tau - tau) < 1e-9);
    CHECK(ell_prime(A_of_tau(tau), sp) > 0.0);
  }
}

TEST_CASE("entropy exponent") {
  const SaddlePoint& sp = saddle();
  const OverlapPoint zero{0.0, 0.0, 1.0};
  CHECK(std::abs(H_of_lambda(zero, sp)) < 1e-9);
  CHECK(std::abs(H_deriv(zero, sp, 1)) < 1e-15);
  CHECK(H_of_lambda(ell_inverse(1.0 - 1e-7, sp), sp) == doctest::Approx(-h_star(sp)).epsilon(1e-3));
  CHECK(-h_star(sp) == doctest::Approx(-0.344).epsilon(0.002 / 0.344));
  for (double lambda = -0.4; lambda <= 0.95; lambda += 0.05) CHECK(H_deriv(ell_inverse(lambda, sp), sp, 2) < 0.0);
}

TEST_CASE("constraint integrals") {
  const SaddlePoint& sp = saddle();
  CHECK(std::abs(I_s(0.0, 0.0, sp) - (p_star(sp) - sp.psi_star * (1 - sp.q_star) / 2)) < 1e-9);
  CHECK(std::abs(I_s(0.3, 0.0, sp) - I_s_gamma_form(0.3, 0.0, sp)) < 1e-9);
  CHECK(std::abs(I_s(0.3, -0.09, sp) - I_s_gamma_form(0.3, -0.09, sp)) < 1e-9);
  const double h = 1e-4;
  const double fd = (I_s(0.2, 0.1 + h, sp) - I_s(0.2, 0.1 - h, sp)) / (2 * h);
  CHECK(std::abs(dI_ds(0.2, 0.1, sp) - fd) < 1e-6);
}

TEST_CASE("tilt exponents") {
  const SaddlePoint& sp = saddle();
  for (double lambda : {-0.4, -0.1, 0.0, 0.3, 0.7, 0.95}) CHECK(std::abs(B_fn(lambda, 0.0, sp)) < 1e-9);
  const double h = 1e-4;
  CHECK(std::abs((B_fn(0.0, h, sp) - B_fn(0.0, -h, sp)) / (2 * h)) < 1e-6);
  const TiltMin a0 = A_fn(0.0, sp);
  CHECK(std::abs(a0.value) < 1e-8);
  CHECK(std::abs(a0.s_opt) < 1e-4);
  for (double lambda : {-0.4, -0.2, 0.2, 0.5, 0.8}) {
    const TiltMin a = A_fn(lambda, sp);
    CHECK(a.value <= 1e-12);
    CHECK(a.value <= B_fn(lambda, -0.3 * lambda, sp) + 1e-12);
    CHECK(P_of_lambda(lambda, sp) + a.value <= Q_fn(lambda, sp) + 1e-9);
  }
}

TEST_CASE("constraint exponent") {
  const SaddlePoint& sp = saddle();
  CHECK(std::abs(P_of_lambda(0.0, sp)) < 1e-9);
  CHECK(P_of_lambda(1.0 - 1e-7, sp) == doctest::Approx(-p_star(sp)).epsilon(1e-3));
  CHECK(-p_star(sp) == doctest::Approx(0.344).epsilon(0.002 / 0.344));
}

TEST_CASE("second-moment exponent shape") {
  const SaddlePoint& sp = saddle();
  const ExponentSample mid = exponent_sample(0.5, sp);
  CHECK(mid.S_P < 0.0);
  CHECK(mid.S_val <= mid.S_P);
  const ExponentSample one = exponent_sample(1.0, sp);
  CHECK(one.H_val == doctest::Approx(-h_star(sp)));
  CHECK(one.P_val == doctest::Approx(-p_star(sp)));
  CHECK(one.S_val == doctest::Approx(-sp.g_star).epsilon(1e-12));
  const ExponentSample zero = exponent_sample(0.0, sp);
  CHECK(std::abs(zero.S_val) < 1e-8);
  const double h = 1e-3;
  const double slope = (exponent_sample(h, sp).S_val - exponent_sample(-h, sp).S_val) / (2 * h);
  CHECK(std::abs(slope) < 1e-5);
}
