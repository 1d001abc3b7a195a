// The tau grids of the three grid searches, stored as tabulated.
#include "percap/condition_g.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

namespace percap {

namespace {

struct Block {
  double a, b, eta;  // eta = 0 marks a single explicit entry a
};

std::vector<double> expand(std::initializer_list<Block> blocks) {
  std::vector<double> t;
  for (const Block& bl : blocks) {
    if (bl.eta == 0.0) {
      t.push_back(bl.a);
      continue;
    }
    // Adjacent blocks may share an end point; keep one copy.
    for (double x : arith_block(bl.a, bl.b, bl.eta))
      if (t.empty() || x > t.back()) t.push_back(x);
  }
  return t;
}

Block at(double x) { return {x, x, 0.0}; }

}  // namespace

std::vector<double> arith_block(double a, double b, double eta) {
  if (!(eta > 0.0) || !(b > a)) throw std::invalid_argument("arith_block: need eta > 0 and b > a");
  // The ratio is an integer for every tabulated block; absorb its rounding.
  const auto n = static_cast<long>(std::floor((b - a) / eta + 1e-9)) + 1;
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j) {
    // Round to the 1e-9 lattice so the entries are the decimal values themselves.
    s.push_back(std::round((a + eta * static_cast<double>(j)) * 1e9) / 1e9);
  }
  return s;
}

std::vector<double> GridSpec::knots() const {
  std::vector<double> k = printed;
  if (sign_regime == SignRegime::nonpos) {
    for (double& x : k) x = -x;
    std::reverse(k.begin(), k.end());
  }
  for (std::size_t i = 1; i < k.size(); ++i)
    if (!(k[i] > k[i - 1])) throw std::logic_error("grid " + name + " is not strictly increasing");
  return k;
}

GridSpec grid_value_sp() {
  return {Part::AValue,
          "value_SP",
          expand({{0.24, 0.284, 0.001}, {0.285, 0.315, 0.002}, {0.318, 0.342, 0.003}, {0.346, 0.366, 0.004},
                  {0.371, 0.386, 0.005}, {0.392, 0.404, 0.006}, at(0.411), at(0.418), at(0.425), at(0.433), at(0.441),
                  {0.45, 0.57, 0.01}, {0.59, 0.67, 0.02}, {0.7, 0.76, 0.03}, {0.8, 0.94, 0.04}, at(0.95), at(0.98), at(0.99)}),
          SignRegime::nonneg};
}

GridSpec grid_value_sq() {
  return {Part::AValue,
          "value_SQ",
          expand({{0.18, 0.209, 0.001}, {0.21, 0.236, 0.002}, {0.238, 0.268, 0.003}, {0.271, 0.343, 0.004},
                  {0.347, 0.419, 0.006}, {0.425, 0.513, 0.008}, {0.52, 0.77, 0.01}, at(0.78), at(0.8), at(0.82), at(0.84),
                  at(0.86), at(0.89), at(0.93), at(1.0)}),
          SignRegime::nonpos};
}

GridSpec grid_deriv_pos() {
  return {Part::BFirstDeriv,
          "deriv_pos",
          expand({{0.06, 0.076, 0.001}, {0.078, 0.098, 0.002}, {0.101, 0.116, 0.003}, {0.12, 0.14, 0.004}, at(0.145),
                  at(0.15), at(0.156), at(0.162), at(0.168), {0.175, 0.21, 0.007}, {0.21, 0.26, 0.01}}),
          SignRegime::nonneg};
}

GridSpec grid_deriv_neg() {
  return {Part::BFirstDeriv,
          "deriv_neg",
          {0.03, 0.031, 0.032, 0.033, 0.034, 0.036, 0.038, 0.041, 0.045, 0.05, 0.056, 0.063, 0.071, 0.081,
           0.092, 0.104, 0.116, 0.128, 0.14, 0.15, 0.159, 0.166, 0.172, 0.177, 0.18, 0.185, 0.19},
          SignRegime::nonpos};
}

GridSpec grid_second_deriv() {
  // Straddles tau = 0; stored with its signs, so the regime flag is unused.
  return {Part::CSecondDeriv,
          "second_deriv",
          {-0.043, -0.039, -0.035, -0.03, -0.025, -0.019, -0.013, -0.007, 0.0, 0.007, 0.015, 0.024, 0.033, 0.043, 0.054,
           0.066, 0.078},
          SignRegime::nonneg};
}

std::vector<GridSpec> all_grids() {
  return {grid_value_sp(), grid_value_sq(), grid_deriv_pos(), grid_deriv_neg(), grid_second_deriv()};
}

std::vector<double> refine_knots(const std::vector<double>& knots, int k) {
  if (k < 1) throw std::invalid_argument("refine_knots: k must be >= 1");
  if (knots.size() < 2 || k == 1) return knots;
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    for (int j = 0; j < k; ++j) out.push_back(a + (b - a) * j / k);
  }
  out.push_back(knots.back());
  return out;
}

}  // namespace percap
