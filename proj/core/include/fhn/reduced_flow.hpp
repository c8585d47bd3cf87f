#pragma once

// Reduced flow on the critical manifold and its desingularizations.
//
// On C0 the slow equations become phi'(x_i) x_i' = N_i(x1, x2), where N_i is
// the slow right-hand side y_i' evaluated at y = phi(x). Two time rescalings
// remove the division by phi':
//
//   H (fold in x2): x1' = phi'(x2)/phi'(x1) N1,  x2' = N2
//   F (both folds): x1' = phi'(x2) N1,           x2' = phi'(x1) N2
//
// Folded equilibria are equilibria of H on a fold line; double folds are
// equilibria of F at |x1| = |x2| = 2/sqrt(3).

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fhn/geometry.hpp"
#include "fhn/model.hpp"

namespace fhn {

enum class StabilityClass {
  Saddle,
  UnstableNode,
  UnstableFocus,
  SaddleNode,
  Center,
  Degenerate,
  StableNode,
  StableFocus,
};

std::string to_string(StabilityClass c);

/// Which fast variable sits on the fold line.
enum class FoldedVariable { First, Second };

std::string to_string(FoldedVariable v);

enum class CanardVerdict { CanardPossible, NoCanard, Inconclusive };

std::string to_string(CanardVerdict v);

inline constexpr double kClassTol = 1e-12;

/// Trace-determinant chart. |det| <= tol is SaddleNode (Degenerate when the
/// trace also vanishes); det within tol of trace^2/4 is Degenerate; trace 0
/// with det > 0 is Center.
StabilityClass classify_trace_det(double det, double trace, double tol = kClassTol);

/// Slow right-hand sides (N1, N2) = (y1', y2') at the lifted point (x1, x2, phi(x1), phi(x2)).
std::pair<double, double> slow_numerators(const Params& p, double x1, double x2);

/// d(N1, N2)/d(x1, x2) along C0.
Eigen::Matrix2d slow_numerators_jacobian(const Params& p, double x1, double x2);

/// (x1', x2') of the reduced flow in time t. Throws SingularProjection on a fold line.
std::pair<double, double> slow_rhs_on_C0(const Params& p, double x1, double x2);

/// Desingularized flow for a fold in `folded`. For Second this is
/// (phi'(x2)/phi'(x1) N1, N2); for First the roles are exchanged.
/// Throws SingularProjection where the remaining division is by zero.
std::pair<double, double> H(const Params& p, double x1, double x2,
                            FoldedVariable folded = FoldedVariable::Second);
Eigen::Matrix2d jacobian_H(const Params& p, double x1, double x2,
                           FoldedVariable folded = FoldedVariable::Second);

std::pair<double, double> F(const Params& p, double x1, double x2);
Eigen::Matrix2d jacobian_F(const Params& p, double x1, double x2);

struct PlanarSample {
  double s = 0.0;  // rescaled time
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Orbit of F from x0 over rescaled time [0, s_end] (s_end < 0 runs
/// backwards). Stops early if |x1| or |x2| exceeds `bound`.
std::vector<PlanarSample> desingularized_orbit(const Params& p, std::array<double, 2> x0,
                                               double s_end, double bound = 3.0);

/// Sign of the time rescaling relating t to the desingularized time:
/// phi'(x2) for H (fold in x2), phi'(x1) phi'(x2) for F.
double rescaling_sign_H(double x1, double x2);
double rescaling_sign_F(double x1, double x2);

struct FoldedEquilibrium {
  double x1_star = 0.0;
  double x2_star = 0.0;
  int sigma = 1;
  FoldedVariable folded_variable = FoldedVariable::Second;
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
  double det = 0.0;
  double trace = 0.0;
  StabilityClass cls = StabilityClass::Degenerate;
  /// Boundary component dA_i* containing the point, when the free variable
  /// lies strictly beyond the fold (|x| > 2/sqrt(3)); empty otherwise.
  std::optional<RegionLabel> boundary;
  /// True when the free variable is also on a fold line (a double fold).
  bool at_double_fold = false;

  bool outside_A() const { return !boundary.has_value(); }
  double free_value() const { return folded_variable == FoldedVariable::Second ? x1_star : x2_star; }
};

/// Real roots of t^3 + a t + b = 0 in increasing order. Closed form away from
/// a double root; bracketing bisection when |discriminant| < 1e-12. Roots are
/// Newton-polished.
std::vector<double> depressed_cubic_roots(double a, double b);

/// All real solutions of k phi(x) = c + (b+k) phi(2 sigma/sqrt3) - 2 sigma/sqrt3
/// for the free variable. Symmetric coupling only; throws ZeroCoupling if k = 0.
std::vector<FoldedEquilibrium> find_folded_equilibria(const Params& p, int sigma,
                                                      FoldedVariable folded);

/// Residual of the folded-equilibrium condition at fe.
double folded_condition_residual(const Params& p, const FoldedEquilibrium& fe);

struct DhReport {
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
  double det = 0.0;              // from the matrix
  double det_closed_form = 0.0;  // -k phi''(x_f) [x1 + x2 - b(phi(x1) + phi(x2)) - 2c]
  double trace = 0.0;
  StabilityClass cls = StabilityClass::Degenerate;
};

DhReport jacobian_DH(const Params& p, const FoldedEquilibrium& fe);

// ---------------------------------------------------------------------------
// Sufficient conditions (b = 0) for the type of a folded equilibrium with the
// fold in x2, one row per hypothesis set.

enum class FoldedType { Saddle, NodeOrFocus };

std::string to_string(FoldedType c);

// mid = (x1* + x2*)/2, f = 2/sqrt3; all inequalities strict.
enum class CCondition {
  BelowFold,         // c < f
  FoldToMid,         // f < c < mid
  AboveMid,          // c > mid
  AboveFold,         // c > f
  ZeroToFold,        // 0 < c < f
  BelowX1,           // c < x1*
  AboveNegFold,      // c > -f
  MidToNegFold,      // mid < c < -f
  BelowMid,          // c < mid
  BelowNegFold,      // c < -f
  NegFoldToZero,     // -f < c < 0
  AboveX1,           // c > x1*
};

struct FoldedConditionRow {
  int index = 0;           // 1-based, in table order
  RegionLabel region;      // A1..A4: the boundary component dA_i*
  CCondition c_condition;
  int phi_order = 0;       // sign of phi(x1*) - phi(x2*) required; 0 = none
  int k_sign = 0;          // +1 or -1
  FoldedType printed;     // type as tabulated
  FoldedType derived;     // type implied by the sign of det DH
  std::string text;

  bool erratum() const { return printed != derived; }
  /// Whether (c, x1*, x2*) satisfy the row's c-condition (strict inequalities).
  bool c_holds(double c, double x1, double x2) const;
};

const std::vector<FoldedConditionRow>& folded_condition_rows();

enum class ConditionVerdict { Consistent, Inconsistent, Inconclusive, NotApplicable };

std::string to_string(ConditionVerdict v);

struct FoldedConditionMatch {
  std::optional<RegionLabel> region;  // dA_i* in the x2-fold frame
  std::optional<int> row;             // matched row index
  std::optional<FoldedType> predicted;
  StabilityClass cls = StabilityClass::Degenerate;
  ConditionVerdict verdict = ConditionVerdict::NotApplicable;
};

/// Finds the row whose hypotheses hold for fe (folds in x1 are mapped by the
/// swap symmetry) and compares the row's derived prediction with the
/// eigenvalue class. For b != 0 no row applies and the verdict is
/// NotApplicable. Throws NoRowMatches when b = 0, fe lies on dA and no row's
/// hypotheses hold.
FoldedConditionMatch classify_folded_conditions(const Params& p, const FoldedEquilibrium& fe);

// ---------------------------------------------------------------------------
// Double folds X = (x*, +-x*), x* = 2 sigma/sqrt3.

enum class DoubleFoldCondition { None, I, II, III, IV };

std::string to_string(DoubleFoldCondition c);

struct DoubleFoldReport {
  double x1 = 0.0;
  double x2 = 0.0;
  bool same_sign = true;
  int sigma = 1;
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();  // closed form
  double det = 0.0;
  double trace = 0.0;
  StabilityClass cls = StabilityClass::Degenerate;
  CanardVerdict verdict = CanardVerdict::Inconclusive;
  DoubleFoldCondition condition = DoubleFoldCondition::None;
};

DoubleFoldReport double_fold_jacobian(const Params& p, bool same_sign, int sigma);

/// b = 0, k > 0, sigma c < 2/sqrt3 and the folded equilibrium on dA1* (sigma
/// = +1) or dA3* (sigma = -1) has 0 < det DH < 1/4. Throws InvalidParams if b != 0.
bool folded_node_check(const Params& p, int sigma);

/// The other solution of phi(x) = phi(x_fold) on an attracting branch:
/// -2 x_fold. Throws NotAFoldPoint unless |x_fold| is within 1e-9 of 2/sqrt3.
double jump_target(double x_fold);

// ---------------------------------------------------------------------------
// Singular orbits: slow arcs on C0 joined by instantaneous fast jumps.

struct SlowArc {
  std::vector<double> times;
  std::vector<State> states;
};

struct FastJump {
  double t = 0.0;
  State from;  // on the fold line
  State to;    // same (y1, y2), jumping variable(s) moved to jump_target
  int cell = 0;  // 1 or 2; 0 when both cells jump together
};

enum class OrbitTermination { ArcLimit, SlowEquilibrium, DoubleFold, TimeLimit };

std::string to_string(OrbitTermination t);

struct SingularOrbit {
  std::vector<SlowArc> arcs;
  std::vector<FastJump> jumps;  // jumps[i] follows arcs[i]
  OrbitTermination termination = OrbitTermination::ArcLimit;
};

struct SingularOrbitOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  double max_time_per_arc = 1e4;
  double equilibrium_tol = 1e-8;
  double double_fold_tol = 1e-9;
};

/// Starting from (x0_1, x0_2) in A, integrates the reduced flow until a fold
/// is reached, jumps, and repeats for at most `arcs` slow arcs. An orbit on
/// the synchrony or antisynchrony line reaches the double fold with both
/// cells at once; both then jump together. Any other arrival at a double fold
/// stops the orbit.
SingularOrbit singular_orbit(const Params& p, std::array<double, 2> x0, int arcs,
                             const SingularOrbitOptions& opt = {});

}  // namespace fhn
