// Computer-assisted check that the second-moment exponent S(lambda) is
// negative for every overlap lambda outside {0, 1}.
//
// The overlap axis is tiled by four arguments. Near lambda = 1 an analytic
// chain of scalar bounds applies. On [0.2, 0.98] and [lambda_min, -0.125]
// the value of S_P (resp. S_Q) is bounded above on tau-cells. On
// [-0.125, -0.03] and [0.05, 0.2] the sign of S_P' is certified. On
// [-0.03, 0.05] S_P'' < 0 is certified. Every cell works on envelope
// brackets: the saddle constants (alpha, q, psi) and the cell's lambda range
// enter as intervals, integrands are evaluated by natural interval
// extension along monotone factors, and each truncated domain carries its
// tail constant as a declared budget.
#pragma once

#include "percap/interval.hpp"
#include "percap/quadrature.hpp"
#include "percap/replica_saddle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace percap {

enum class Part { Constants, AValue, BFirstDeriv, CSecondDeriv, NearOne };
std::string part_name(Part p);

enum class SignRegime { nonneg, nonpos };

// Entries a + eta (j-1) for 1 <= j <= floor((b-a)/eta) + 1, so b is the last
// entry when (b-a)/eta is an integer. Only this reading makes the grids reach
// the tau values their coverage claims need (0.26 on the derivative grid).
std::vector<double> arith_block(double a, double b, double eta);

struct GridSpec {
  Part part = Part::AValue;
  std::string name;
  std::vector<double> printed;  // the t vector as tabulated (positive entries)
  SignRegime sign_regime = SignRegime::nonneg;
  // Cell knots in increasing tau: t itself, or -t reversed when nonpos.
  std::vector<double> knots() const;
};

GridSpec grid_value_sp();       // S_P on 0.24 ... 0.99
GridSpec grid_value_sq();       // S_Q on -1 ... -0.18
GridSpec grid_deriv_pos();      // S_P' < 0 on 0.06 ... 0.26
GridSpec grid_deriv_neg();      // S_P' > 0 on -0.19 ... -0.03
GridSpec grid_second_deriv();   // S_P'' < 0 on -0.043 ... 0.078
std::vector<GridSpec> all_grids();

// Splits every cell of the knot vector into k equal pieces.
std::vector<double> refine_knots(const std::vector<double>& knots, int k);

// Interval box of the saddle constants: factors "alpha", "q", "psi".
ParamBox constants_box(const Constants6& c = Constants6::table());

struct VerifierOptions {
  Constants6 constants = Constants6::table();
  BracketOptions quad{1e-9, 1e-9, 4000};
  // The ell sandwich feeds every lambda bracket, so it runs much tighter.
  BracketOptions sandwich_quad{1e-14, 1e-14, 4000};
  int refine = 1;
  // Extra split of the negative first-derivative grid. Its tabulated cells
  // are too wide for the bound form (see README), so they are subdivided.
  int deriv_neg_split = 16;
  bool stop_on_fail = false;
  std::vector<Part> parts{Part::Constants, Part::AValue, Part::BFirstDeriv, Part::CSecondDeriv, Part::NearOne};
  unsigned workers = 0;  // 0: worker_count()
};

// ell_in / ell_out at tau, with lambda_lb = min - quad slack and
// lambda_ub = max + quad slack.
struct LambdaEndpoint {
  double tau = 0.0;
  double A = 1.0;
  double ell_in = 0.0;
  double ell_out = 0.0;
  double lambda_lb = 0.0;
  double lambda_ub = 0.0;
  double budget = 0.0;
};

LambdaEndpoint lambda_endpoint(double tau, const ParamBox& box, const BracketOptions& opt);

struct LambdaSandwich {
  LambdaEndpoint lo;  // at tau_lo
  LambdaEndpoint hi;  // at tau_hi
  double lambda_lb = 0.0, lambda_ub = 0.0;
  double L_lb = 0.0, L_ub = 0.0;  // bounds on lambda^2
  double c_lb = 0.0, c_ub = 0.0;  // bounds on c_lambda = sqrt((1-lambda)/(1+lambda))
  Interval lambda() const { return {lambda_lb, lambda_ub}; }
};

// Requires tau_lo <= tau_hi of the same sign; throws on sandwich inversion.
LambdaSandwich lambda_sandwich(double tau_lo, double tau_hi, const ParamBox& box, const BracketOptions& opt);

struct BudgetItem {
  std::string name;
  double value = 0.0;
};

struct CellResult {
  Part part = Part::AValue;
  std::string variant;  // SP, SQ, dSP_ub, dSP_lb, d2SP_ub
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  BoundBracket lambda_bracket;
  // One-sided: an upper bound keeps lo = -inf, a lower bound keeps hi = +inf.
  BoundBracket bound_value;
  std::string relation;  // "< 0" or "> 0"
  bool pass = false;
  std::vector<BudgetItem> budgets;
  std::string note;  // quadrature failure or skip reason; empty otherwise
};

enum class ValueVariant { SP, SQ };
enum class DerivSide { want_negative, want_positive };

CellResult value_bound_cell(double tau_lo, double tau_hi, ValueVariant v, const ParamBox& box, const VerifierOptions& opt = {});
CellResult deriv_bound_cell(double tau_lo, double tau_hi, DerivSide side, const ParamBox& box, const VerifierOptions& opt = {});
CellResult second_deriv_bound_cell(double tau_lo, double tau_hi, const ParamBox& box, const VerifierOptions& opt = {});

// Links of the near-one argument, one check each. The chain runs on the
// computed constants; `tabulated` compares them with the rounded constants
// as printed and does not gate the result.
struct NearOneResult {
  std::vector<NamedCheck> links;
  std::vector<NamedCheck> tabulated;
  double k1 = 0.0, k2 = 0.0;  // 1 - ell(A) <= k1/A + k2/A^2
  double J = 0.0;             // upper bound on I(lambda)/iota^{1/2} for lambda >= 0.975
  double iota_star = 0.0;     // certified for 0 < iota <= iota_star
  double certified_lo = 1.0;  // 1 - iota_star
  bool pass = false;
};
NearOneResult near_one_check(const ParamBox& box, const VerifierOptions& opt = {});

struct CoverageItem {
  Part part = Part::AValue;
  std::string claim;
  double certified_lo = 0.0, certified_hi = 0.0;
  double required_lo = 0.0, required_hi = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<NamedCheck> constants;  // the saddle-constant checks
  std::vector<CellResult> cells;      // sorted by (part, tau_lo)
  std::vector<NamedCheck> checks;     // endpoint, sandwich and near-one checks
  std::vector<NamedCheck> diagnostics;  // tabulated constants compared, not gating
  std::vector<CoverageItem> coverage;
  std::vector<BudgetItem> budgets;    // totals per budget name over all cells
  double budget_total = 0.0;
  std::vector<std::string> notes;     // deviations from the tabulated formulas
  std::optional<std::size_t> first_failed_cell;
  bool stopped_early = false;
  bool verdict = false;
};

VerificationReport verify_condition_g(const VerifierOptions& opt = {});

// Variant with an explicit constants box, used to probe widened envelopes.
VerificationReport verify_condition_g(const VerifierOptions& opt, const ParamBox& box);

}  // namespace percap
