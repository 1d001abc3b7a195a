#include "percap/condition_g.hpp"
#include "percap/overlap_exponents.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace percap;

namespace {

const SaddlePoint& saddle() {
  static const SaddlePoint sp = solve_saddle({0.0, 0.5 * (Constants6::table().alpha_lb + Constants6::table().alpha_ub)});
  return sp;
}

struct Run {
  int from, to, step;  // thousandths, inclusive
};

// Independent transcription of a tabulated grid in integer thousandths.
std::vector<double> thousandths(std::initializer_list<Run> runs) {
  std::vector<double> t;
  for (const Run& r : runs)
    for (int x = r.from; x <= r.to; x += r.step)
      if (t.empty() || x / 1000.0 > t.back()) t.push_back(x / 1000.0);
  return t;
}

void check_same(const std::vector<double>& got, const std::vector<double>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

double S_P_plain(double lambda) { return exponent_sample(lambda, saddle()).S_P; }
double S_Q_plain(double lambda) { return exponent_sample(lambda, saddle()).S_Q; }

}  // namespace

TEST_CASE("arithmetic blocks include the right end point") {
  const auto s = arith_block(0.21, 0.26, 0.01);
  REQUIRE(s.size() == 6);
  CHECK(s.front() == 0.21);
  CHECK(s.back() == doctest::Approx(0.26));
  CHECK_THROWS(arith_block(0.3, 0.2, 0.01));
}

TEST_CASE("embedded grids match their tabulated vectors") {
  check_same(grid_value_sp().printed,
             thousandths({{240, 284, 1}, {285, 315, 2}, {318, 342, 3}, {346, 366, 4}, {371, 386, 5}, {392, 404, 6}, {411, 411, 1},
                          {418, 418, 1}, {425, 425, 1}, {433, 433, 1}, {441, 441, 1}, {450, 570, 10}, {590, 670, 20},
                          {700, 760, 30}, {800, 940, 40}, {950, 950, 1}, {980, 980, 1}, {990, 990, 1}}));
  check_same(grid_value_sq().printed,
             thousandths({{180, 209, 1}, {210, 236, 2}, {238, 268, 3}, {271, 343, 4}, {347, 419, 6}, {425, 513, 8}, {520, 770, 10},
                          {780, 780, 1}, {800, 800, 1}, {820, 820, 1}, {840, 840, 1}, {860, 860, 1}, {890, 890, 1},
                          {930, 930, 1}, {1000, 1000, 1}}));
  check_same(grid_deriv_pos().printed,
             thousandths({{60, 76, 1}, {78, 98, 2}, {101, 116, 3}, {120, 140, 4}, {145, 145, 1}, {150, 150, 1}, {156, 156, 1},
                          {162, 162, 1}, {168, 168, 1}, {175, 210, 7}, {210, 260, 10}}));
  const auto neg = grid_deriv_neg().printed;
  CHECK(neg.size() == 27);
  double sum = 0.0;
  for (double x : neg) sum += x;
  CHECK(sum == doctest::Approx(2.6).epsilon(1e-12));
  const auto sec = grid_second_deriv().printed;
  CHECK(sec.size() == 17);
  CHECK(sec.front() == -0.043);
  CHECK(sec.back() == 0.078);
}

TEST_CASE("knots and refinement") {
  const auto k = grid_value_sq().knots();
  CHECK(k.front() == -1.0);
  CHECK(k.back() == -0.18);
  const auto r = refine_knots({0.0, 1.0, 3.0}, 4);
  REQUIRE(r.size() == 9);
  CHECK(r[4] == 1.0);
  CHECK(r[6] == doctest::Approx(2.0));
  CHECK_THROWS(refine_knots({0.0, 1.0}, 0));
}

TEST_CASE("lambda brackets at tau endpoints") {
  const ParamBox box = constants_box();
  VerifierOptions opt;
  const LambdaEndpoint z = lambda_endpoint(0.0, box, opt.sandwich_quad);
  CHECK(z.lambda_lb <= 0.0);
  CHECK(z.lambda_ub >= 0.0);
  CHECK(z.lambda_ub - z.lambda_lb <= 1.5e-11);
  for (double tau : {-0.6, -0.1, 0.2, 0.7}) {
    const LambdaEndpoint e = lambda_endpoint(tau, box, opt.sandwich_quad);
    const double A = A_of_tau(tau);
    CHECK((e.ell_out - e.ell_in > 0.0) == (A > 1.0));
    CHECK(e.lambda_lb <= ell(A, saddle()));
    CHECK(e.lambda_ub >= ell(A, saddle()));
  }
  CHECK(lambda_endpoint(0.24, box, opt.sandwich_quad).lambda_ub < 0.2);
  CHECK(lambda_endpoint(0.99, box, opt.sandwich_quad).lambda_lb > 0.98);
  CHECK(lambda_endpoint(0.26, box, opt.sandwich_quad).lambda_lb > 0.2);
  CHECK(lambda_endpoint(0.06, box, opt.sandwich_quad).lambda_ub < 0.05);
  CHECK(lambda_endpoint(-0.043, box, opt.sandwich_quad).lambda_ub < -0.03);
  CHECK(lambda_endpoint(0.078, box, opt.sandwich_quad).lambda_lb > 0.05);
}

TEST_CASE("the m-dependent factor is at most 2^{-1/2}") {
  for (double x = -20.0; x <= 20.0; x += 0.001) CHECK(std::abs(x * sech2(x)) <= 1.0 / std::sqrt(2.0));
}

TEST_CASE("value cells") {
  const ParamBox box = constants_box();
  const CellResult c = value_bound_cell(0.24, 0.241, ValueVariant::SP, box);
  CHECK(c.pass);
  CHECK(c.bound_value.hi < 0.0);
  const CellResult wide = value_bound_cell(0.24, 0.99, ValueVariant::SP, box);
  CHECK_FALSE(wide.pass);
}

TEST_CASE("cell bounds contain plain evaluations at interior overlaps") {
  const ParamBox box = constants_box();
  auto interior = [](const CellResult& c, int k) {
    const double t = c.tau_lo + (c.tau_hi - c.tau_lo) * (k + 0.5) / 5;
    return ell(A_of_tau(t), saddle());
  };
  SUBCASE("S_P upper bound") {
    const CellResult c = value_bound_cell(0.45, 0.46, ValueVariant::SP, box);
    for (int k = 0; k < 5; ++k) CHECK(S_P_plain(interior(c, k)) <= c.bound_value.hi);
  }
  SUBCASE("S_Q upper bound") {
    const CellResult c = value_bound_cell(-0.42, -0.414, ValueVariant::SQ, box);
    for (int k = 0; k < 5; ++k) CHECK(S_Q_plain(interior(c, k)) <= c.bound_value.hi);
  }
  SUBCASE("first derivative bounds") {
    const double h = 1e-4;
    const CellResult up = deriv_bound_cell(0.12, 0.124, DerivSide::want_negative, box);
    for (int k = 0; k < 5; ++k) {
      const double l = interior(up, k);
      CHECK((S_P_plain(l + h) - S_P_plain(l - h)) / (2 * h) <= up.bound_value.hi);
    }
    const CellResult lo = deriv_bound_cell(-0.1, -0.099, DerivSide::want_positive, box);
    for (int k = 0; k < 5; ++k) {
      const double l = interior(lo, k);
      CHECK((S_P_plain(l + h) - S_P_plain(l - h)) / (2 * h) >= lo.bound_value.lo);
    }
  }
  SUBCASE("second derivative bound") {
    const double h = 1e-3;
    const CellResult c = second_deriv_bound_cell(0.015, 0.024, box);
    for (int k = 0; k < 5; ++k) {
      const double l = interior(c, k);
      CHECK((S_P_plain(l + h) - 2 * S_P_plain(l) + S_P_plain(l - h)) / (h * h) <= c.bound_value.hi);
    }
  }
}

TEST_CASE("widening a single envelope never turns a failing cell into a passing one") {
  // The envelope directions are fixed by monotone factor maps; a wider
  // factor interval is the weaker side of every one of them.
  const ParamBox base = constants_box();
  struct Probe {
    double lo, hi;
    int kind;
  };
  for (const Probe& p : {Probe{0.3, 0.303, 0}, Probe{0.09, 0.092, 1}, Probe{0.0, 0.007, 2}}) {
    auto run = [&](const ParamBox& box) {
      if (p.kind == 0) return value_bound_cell(p.lo, p.hi, ValueVariant::SP, box);
      if (p.kind == 1) return deriv_bound_cell(p.lo, p.hi, DerivSide::want_negative, box);
      return second_deriv_bound_cell(p.lo, p.hi, box);
    };
    const CellResult ref = run(base);
    for (const char* f : {"q", "psi", "alpha"}) {
      ParamBox w = base;
      const Interval v = base.get(f);
      w.set(f, {v.lo - 1e-4, v.hi + 1e-4});
      const CellResult c = run(w);
      INFO(f);
      CHECK(c.bound_value.hi >= ref.bound_value.hi - 1e-12);
      if (!ref.pass) CHECK_FALSE(c.pass);
    }
  }
}

TEST_CASE("near-one chain") {
  const NearOneResult r = near_one_check(constants_box());
  for (const auto& l : r.links) {
    INFO(l.name);
    CHECK(l.pass);
  }
  CHECK(r.pass);
  CHECK(r.J < 0.0);
  CHECK(r.certified_lo < 0.99);
  // The computed middle-term constant meets its tabulated value.
  const Constants6 c = Constants6::table();
  CHECK(c.psi_ub * (1 - c.q_lb) / (2 * (2 - 0.025)) <= 0.285);
  // 1 - ell(200) against the computed two-term tail bound.
  CHECK(1 - ell(200.0, saddle()) <= r.k1 / 200 + r.k2 / (200.0 * 200.0) + 1e-12);
}

TEST_CASE("full verification at the capacity") {
  const VerificationReport rep = verify_condition_g();
  CHECK(rep.verdict);
  CHECK_FALSE(rep.first_failed_cell.has_value());
  for (const auto& c : rep.coverage) {
    INFO(c.claim);
    CHECK(c.pass);
  }
  CHECK(rep.constants.size() >= 6);

  SUBCASE("budgets are additive") {
    std::map<std::string, double> totals;
    double total = 0.0;
    for (const auto& c : rep.cells)
      for (const auto& b : c.budgets) {
        totals[b.name] += b.value;
        total += b.value;
      }
    REQUIRE(totals.size() == rep.budgets.size());
    for (const auto& b : rep.budgets) CHECK(b.value == doctest::Approx(totals[b.name]).epsilon(1e-12));
    CHECK(rep.budget_total == doctest::Approx(total).epsilon(1e-12));
  }
  SUBCASE("cells are sorted by part and tau") {
    for (std::size_t i = 1; i < rep.cells.size(); ++i) {
      const auto& a = rep.cells[i - 1];
      const auto& b = rep.cells[i];
      CHECK((a.part < b.part || (a.part == b.part && (a.variant != b.variant || a.tau_lo <= b.tau_lo))));
    }
  }
}

TEST_CASE("refinement preserves the passes of part a") {
  VerifierOptions opt;
  opt.refine = 2;
  opt.parts = {Part::AValue};
  CHECK(verify_condition_g(opt).verdict);
}

TEST_CASE("a widened psi envelope fails the verification") {
  VerifierOptions opt;
  opt.stop_on_fail = true;
  ParamBox box = constants_box();
  const Interval psi = box.get("psi");
  box.set("psi", {psi.lo - 0.1, psi.hi + 0.1});
  CHECK_FALSE(verify_condition_g(opt, box).verdict);
}

TEST_CASE("worker count does not change the report") {
  VerifierOptions a, b;
  a.parts = b.parts = {Part::CSecondDeriv};
  a.workers = 1;
  b.workers = 3;
  const auto ra = verify_condition_g(a), rb = verify_condition_g(b);
  REQUIRE(ra.cells.size() == rb.cells.size());
  for (std::size_t i = 0; i < ra.cells.size(); ++i) CHECK(ra.cells[i].bound_value.hi == rb.cells[i].bound_value.hi);
}
