#include "fhn/reduced_flow.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "fhn/detail/ode.hpp"

namespace fhn {

std::string to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Saddle: return "Saddle";
    case StabilityClass::UnstableNode: return "UnstableNode";
    case StabilityClass::UnstableFocus: return "UnstableFocus";
    case StabilityClass::SaddleNode: return "SaddleNode";
    case StabilityClass::Center: return "Center";
    case StabilityClass::Degenerate: return "Degenerate";
    case StabilityClass::StableNode: return "StableNode";
    case StabilityClass::StableFocus: return "StableFocus";
  }
  return "?";
}

std::string to_string(FoldedVariable v) { return v == FoldedVariable::First ? "x1" : "x2"; }

std::string to_string(CanardVerdict v) {
  switch (v) {
    case CanardVerdict::CanardPossible: return "CanardPossible";
    case CanardVerdict::NoCanard: return "NoCanard";
    case CanardVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(FoldedType c) { return c == FoldedType::Saddle ? "saddle" : "node or focus"; }

std::string to_string(ConditionVerdict v) {
  switch (v) {
    case ConditionVerdict::Consistent: return "Consistent";
    case ConditionVerdict::Inconsistent: return "Inconsistent";
    case ConditionVerdict::Inconclusive: return "Inconclusive";
    case ConditionVerdict::NotApplicable: return "NotApplicable";
  }
  return "?";
}

std::string to_string(DoubleFoldCondition c) {
  switch (c) {
    case DoubleFoldCondition::None: return "none";
    case DoubleFoldCondition::I: return "i";
    case DoubleFoldCondition::II: return "ii";
    case DoubleFoldCondition::III: return "iii";
    case DoubleFoldCondition::IV: return "iv";
  }
  return "?";
}

std::string to_string(OrbitTermination t) {
  switch (t) {
    case OrbitTermination::ArcLimit: return "ArcLimit";
    case OrbitTermination::SlowEquilibrium: return "SlowEquilibrium";
    case OrbitTermination::DoubleFold: return "DoubleFold";
    case OrbitTermination::TimeLimit: return "TimeLimit";
  }
  return "?";
}

StabilityClass classify_trace_det(double det, double trace, double tol) {
  if (std::abs(det) <= tol) {
    return std::abs(trace) <= tol ? StabilityClass::Degenerate : StabilityClass::SaddleNode;
  }
  if (det < 0.0) return StabilityClass::Saddle;
  if (std::abs(trace) <= tol) return StabilityClass::Center;
  const double disc = det - 0.25 * trace * trace;
  if (std::abs(disc) <= tol) return StabilityClass::Degenerate;
  if (trace > 0.0) return disc < 0.0 ? StabilityClass::UnstableNode : StabilityClass::UnstableFocus;
  return disc < 0.0 ? StabilityClass::StableNode : StabilityClass::StableFocus;
}

namespace {

void require_symmetric(const Params& p, const char* what) {
  if (!p.symmetric()) {
    throw Error(ErrorCode::InvalidParams,
                std::string(what) + " is defined for the symmetric coupling mode only");
  }
}

void require_sigma(int sigma) {
  if (sigma != 1 && sigma != -1) throw Error(ErrorCode::InvalidParams, "sigma must be +1 or -1");
}

constexpr double kSingularTol = 1e-14;

}  // namespace

std::pair<double, double> slow_numerators(const Params& p, double x1, double x2) {
  const State d = rhs(p, State{x1, x2, phi(x1), phi(x2)});
  return {d.y1, d.y2};
}

Eigen::Matrix2d slow_numerators_jacobian(const Params& p, double x1, double x2) {
  const Eigen::Matrix4d J = jacobian(p, State{x1, x2, phi(x1), phi(x2)});
  const Eigen::Matrix2d Jx = J.block<2, 2>(2, 0);
  const Eigen::Matrix2d Jy = J.block<2, 2>(2, 2);
  Eigen::Matrix2d D = Eigen::Matrix2d::Zero();
  D(0, 0) = phi_prime(x1);
  D(1, 1) = phi_prime(x2);
  return Jx + Jy * D;
}

std::pair<double, double> slow_rhs_on_C0(const Params& p, double x1, double x2) {
  const double d1 = phi_prime(x1);
  const double d2 = phi_prime(x2);
  if (std::abs(d1) < kSingularTol || std::abs(d2) < kSingularTol) {
    throw Error(ErrorCode::SingularProjection, "reduced flow is singular on a fold line");
  }
  const auto [n1, n2] = slow_numerators(p, x1, x2);
  return {n1 / d1, n2 / d2};
}

std::pair<double, double> H(const Params& p, double x1, double x2, FoldedVariable folded) {
  const auto [n1, n2] = slow_numerators(p, x1, x2);
  if (folded == FoldedVariable::Second) {
    const double d1 = phi_prime(x1);
    if (std::abs(d1) < kSingularTol) throw Error(ErrorCode::SingularProjection, "H needs phi'(x1) != 0");
    return {phi_prime(x2) / d1 * n1, n2};
  }
  const double d2 = phi_prime(x2);
  if (std::abs(d2) < kSingularTol) throw Error(ErrorCode::SingularProjection, "H needs phi'(x2) != 0");
  return {n1, phi_prime(x1) / d2 * n2};
}

Eigen::Matrix2d jacobian_H(const Params& p, double x1, double x2, FoldedVariable folded) {
  // Work in the frame where the fold is in the second slot.
  const bool swap = folded == FoldedVariable::First;
  const double u = swap ? x2 : x1;  // free
  const double v = swap ? x1 : x2;  // folded
  auto [n1, n2] = slow_numerators(p, x1, x2);
  Eigen::Matrix2d dN = slow_numerators_jacobian(p, x1, x2);
  if (swap) {
    std::swap(n1, n2);
    dN = Eigen::Matrix2d{{dN(1, 1), dN(1, 0)}, {dN(0, 1), dN(0, 0)}};
  }
  const double du = phi_prime(u);
  if (std::abs(du) < kSingularTol) throw Error(ErrorCode::SingularProjection, "DH needs phi'(free) != 0");
  const double dv = phi_prime(v);
  Eigen::Matrix2d M;
  M(0, 0) = dv * (dN(0, 0) * du - n1 * phi_double_prime(u)) / (du * du);
  M(0, 1) = (phi_double_prime(v) * n1 + dv * dN(0, 1)) / du;
  M(1, 0) = dN(1, 0);
  M(1, 1) = dN(1, 1);
  if (swap) M = Eigen::Matrix2d{{M(1, 1), M(1, 0)}, {M(0, 1), M(0, 0)}};
  return M;
}

std::pair<double, double> F(const Params& p, double x1, double x2) {
  const auto [n1, n2] = slow_numerators(p, x1, x2);
  return {phi_prime(x2) * n1, phi_prime(x1) * n2};
}

std::vector<PlanarSample> desingularized_orbit(const Params& p, std::array<double, 2> x0,
                                               double s_end, double bound) {
  using V2 = detail::Vec<2>;
  const double dir = s_end < 0.0 ? -1.0 : 1.0;
  detail::DormandPrinceStepper<2> stepper([&p, dir](const V2& v) {
    const auto [a, b] = F(p, v[0], v[1]);
    return V2{dir * a, dir * b};
  });
  std::vector<detail::ScalarEvent<2>> events = {
      {0, [bound](const V2& v) { return std::max(std::abs(v[0]), std::abs(v[1])) - bound; }, 1, true}};
  detail::DriveOptions<2> opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  opt.t_end = std::abs(s_end);
  opt.max_step = std::max(opt.t_end / 200.0, 1e-6);
  const auto res = detail::drive<2>(stepper, V2{x0[0], x0[1]}, opt, events);
  std::vector<PlanarSample> out;
  out.reserve(res.t.size());
  for (std::size_t i = 0; i < res.t.size(); ++i) out.push_back({dir * res.t[i], res.y[i][0], res.y[i][1]});
  return out;
}

Eigen::Matrix2d jacobian_F(const Params& p, double x1, double x2) {
  const auto [n1, n2] = slow_numerators(p, x1, x2);
  const Eigen::Matrix2d dN = slow_numerators_jacobian(p, x1, x2);
  const double d1 = phi_prime(x1);
  const double d2 = phi_prime(x2);
  Eigen::Matrix2d M;
  M(0, 0) = d2 * dN(0, 0);
  M(0, 1) = phi_double_prime(x2) * n1 + d2 * dN(0, 1);
  M(1, 0) = phi_double_prime(x1) * n2 + d1 * dN(1, 0);
  M(1, 1) = d1 * dN(1, 1);
  return M;
}

double rescaling_sign_H(double, double x2) {
  const double s = phi_prime(x2);
  return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
}

double rescaling_sign_F(double x1, double x2) {
  const double s = phi_prime(x1) * phi_prime(x2);
  return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
}

// ---------------------------------------------------------------------------

std::vector<double> depressed_cubic_roots(double a, double b) {
  auto g = [&](double t) { return (t * t + a) * t + b; };
  auto dg = [&](double t) { return 3.0 * t * t + a; };
  std::vector<double> roots;
  const double disc = -(4.0 * a * a * a + 27.0 * b * b);

  if (disc > 1e-12) {
    // Three distinct real roots.
    const double m = 2.0 * std::sqrt(-a / 3.0);
    const double theta = std::acos(std::clamp(3.0 * b / (a * m), -1.0, 1.0)) / 3.0;
    for (int j = 0; j < 3; ++j) roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * j / 3.0));
  } else if (disc < -1e-12) {
    // One real root.
    const double s = std::sqrt(b * b / 4.0 + a * a * a / 27.0);
    roots.push_back(std::cbrt(-b / 2.0 + s) + std::cbrt(-b / 2.0 - s));
  } else {
    // Near a double root: bracket on the monotone pieces between critical points.
    if (a >= 0.0) {
      roots.push_back(std::cbrt(-b));
    } else {
      const double cp = std::sqrt(-a / 3.0);
      const double big = 2.0 + 2.0 * std::sqrt(std::abs(a)) + std::cbrt(std::abs(b));
      const std::array<std::pair<double, double>, 3> pieces = {
          std::pair{-big, -cp}, std::pair{-cp, cp}, std::pair{cp, big}};
      for (const auto& [lo0, hi0] : pieces) {
        double lo = lo0;
        double hi = hi0;
        double glo = g(lo);
        double ghi = g(hi);
        if (std::abs(glo) <= 1e-12) { roots.push_back(lo); continue; }
        if (std::abs(ghi) <= 1e-12) { roots.push_back(hi); continue; }
        if ((glo < 0.0) == (ghi < 0.0)) continue;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = g(mid);
          if ((gm < 0.0) == (glo < 0.0)) { lo = mid; glo = gm; } else { hi = mid; }
        }
        roots.push_back(0.5 * (lo + hi));
      }
    }
  }
  for (double& r : roots) {
    for (int it = 0; it < 4; ++it) {
      const double d = dg(r);
      if (std::abs(d) < 1e-10) break;
      const double step = g(r) / d;
      r -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(r))) break;
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-9; }),
              roots.end());
  return roots;
}

namespace {

double folded_rhs(const Params& p, int sigma) {
  const double xf = sigma * kFold;
  return p.c + (p.b + p.k) * phi(xf) - xf;
}

std::optional<RegionLabel> boundary_of(double free, double folded_value, FoldedVariable which) {
  if (std::abs(free) <= kFold + kDefaultFoldTol) return std::nullopt;
  const double x1 = which == FoldedVariable::Second ? free : folded_value;
  const double x2 = which == FoldedVariable::Second ? folded_value : free;
  if (x1 > 0.0) return x2 > 0.0 ? RegionLabel::A1 : RegionLabel::A4;
  return x2 > 0.0 ? RegionLabel::A2 : RegionLabel::A3;
}

}  // namespace

std::vector<FoldedEquilibrium> find_folded_equilibria(const Params& p, int sigma,
                                                      FoldedVariable folded) {
  p.validate();
  require_symmetric(p, "folded-equilibrium search");
  require_sigma(sigma);
  if (p.k == 0.0) throw Error(ErrorCode::ZeroCoupling, "folded equilibria need k != 0");

  // k (4x - x^3) = R  <=>  x^3 - 4x + R/k = 0.
  const double R = folded_rhs(p, sigma);
  std::vector<FoldedEquilibrium> out;
  for (double free : depressed_cubic_roots(-4.0, R / p.k)) {
    FoldedEquilibrium fe;
    fe.sigma = sigma;
    fe.folded_variable = folded;
    fe.x1_star = folded == FoldedVariable::Second ? free : sigma * kFold;
    fe.x2_star = folded == FoldedVariable::Second ? sigma * kFold : free;
    fe.boundary = boundary_of(free, sigma * kFold, folded);
    fe.at_double_fold = std::abs(std::abs(free) - kFold) < kDefaultFoldTol;
    const DhReport r = jacobian_DH(p, fe);
    fe.jacobian = r.matrix;
    fe.det = r.det;
    fe.trace = r.trace;
    fe.cls = r.cls;
    out.push_back(fe);
  }
  return out;
}

double folded_condition_residual(const Params& p, const FoldedEquilibrium& fe) {
  return p.k * phi(fe.free_value()) - folded_rhs(p, fe.sigma);
}

DhReport jacobian_DH(const Params& p, const FoldedEquilibrium& fe) {
  require_symmetric(p, "DH");
  DhReport r;
  const double x1 = fe.x1_star;
  const double x2 = fe.x2_star;
  const double folded = fe.folded_variable == FoldedVariable::Second ? x2 : x1;
  r.det_closed_form = -p.k * phi_double_prime(folded) *
                      (x1 + x2 - p.b * (phi(x1) + phi(x2)) - 2.0 * p.c);
  if (std::abs(phi_prime(fe.free_value())) < kSingularTol) {
    // The free variable is on a fold as well: H is undefined, only the
    // closed-form determinant survives.
    r.matrix.setConstant(std::numeric_limits<double>::quiet_NaN());
    r.det = r.det_closed_form;
    r.trace = 1.0;
    r.cls = StabilityClass::Degenerate;
    return r;
  }
  r.matrix = jacobian_H(p, x1, x2, fe.folded_variable);
  r.det = r.matrix.determinant();
  r.trace = r.matrix.trace();
  r.cls = classify_trace_det(r.det, r.trace);
  return r;
}

// ---------------------------------------------------------------------------

bool FoldedConditionRow::c_holds(double c, double x1, double x2) const {
  const double f = kFold;
  const double mid = 0.5 * (x1 + x2);
  switch (c_condition) {
    case CCondition::BelowFold: return c < f;
    case CCondition::FoldToMid: return f < c && c < mid;
    case CCondition::AboveMid: return c > mid;
    case CCondition::AboveFold: return c > f;
    case CCondition::ZeroToFold: return 0.0 < c && c < f;
    case CCondition::BelowX1: return c < x1;
    case CCondition::AboveNegFold: return c > -f;
    case CCondition::MidToNegFold: return mid < c && c < -f;
    case CCondition::BelowMid: return c < mid;
    case CCondition::BelowNegFold: return c < -f;
    case CCondition::NegFoldToZero: return -f < c && c < 0.0;
    case CCondition::AboveX1: return c > x1;
  }
  return false;
}

const std::vector<FoldedConditionRow>& folded_condition_rows() {
  using R = RegionLabel;
  using C = CCondition;
  constexpr auto S = FoldedType::Saddle;
  constexpr auto N = FoldedType::NodeOrFocus;
  static const std::vector<FoldedConditionRow> rows = {
      {1, R::A1, C::BelowFold, 0, +1, N, N, "dA1*: c < f, k > 0"},
      {2, R::A1, C::FoldToMid, 0, -1, S, S, "dA1*: f < c < mid, k < 0"},
      {3, R::A1, C::AboveMid, 0, -1, N, N, "dA1*: c > mid, k < 0"},
      {4, R::A2, C::AboveFold, +1, +1, S, S, "dA2*: c > f, phi1 > phi2, k > 0"},
      {5, R::A2, C::ZeroToFold, +1, -1, N, N, "dA2*: 0 < c < f, phi1 > phi2, k < 0"},
      {6, R::A2, C::BelowX1, +1, -1, N, S, "dA2*: c < x1*, phi1 > phi2, k < 0"},
      {7, R::A2, C::AboveFold, -1, -1, N, N, "dA2*: c > f, phi1 < phi2, k < 0"},
      {8, R::A2, C::ZeroToFold, -1, +1, S, S, "dA2*: 0 < c < f, phi1 < phi2, k > 0"},
      {9, R::A2, C::BelowX1, -1, +1, S, N, "dA2*: c < x1*, phi1 < phi2, k > 0"},
      {10, R::A3, C::AboveNegFold, 0, +1, N, N, "dA3*: c > -f, k > 0"},
      {11, R::A3, C::MidToNegFold, 0, -1, S, S, "dA3*: mid < c < -f, k < 0"},
      {12, R::A3, C::BelowMid, 0, -1, N, N, "dA3*: c < mid, k < 0"},
      {13, R::A4, C::BelowNegFold, +1, -1, N, N, "dA4*: c < -f, phi1 > phi2, k < 0"},
      {14, R::A4, C::NegFoldToZero, +1, +1, S, S, "dA4*: -f < c < 0, phi1 > phi2, k > 0"},
      {15, R::A4, C::AboveX1, +1, +1, N, N, "dA4*: c > x1*, phi1 > phi2, k > 0"},
      {16, R::A4, C::BelowNegFold, -1, +1, S, S, "dA4*: c < -f, phi1 < phi2, k > 0"},
      {17, R::A4, C::NegFoldToZero, -1, -1, N, N, "dA4*: -f < c < 0, phi1 < phi2, k < 0"},
      {18, R::A4, C::AboveX1, -1, -1, S, S, "dA4*: c > x1*, phi1 < phi2, k < 0"},
  };
  return rows;
}

FoldedConditionMatch classify_folded_conditions(const Params& p, const FoldedEquilibrium& fe) {
  FoldedConditionMatch m;
  const DhReport r = jacobian_DH(p, fe);
  m.cls = r.cls;
  if (p.b != 0.0) return m;

  // Map to the frame with the fold in x2.
  double x1 = fe.x1_star;
  double x2 = fe.x2_star;
  if (fe.folded_variable == FoldedVariable::First) std::swap(x1, x2);
  m.region = boundary_of(x1, x2, FoldedVariable::Second);
  if (!m.region) return m;

  const double dphi = phi(x1) - phi(x2);
  const int phi_sign = dphi > 0.0 ? 1 : (dphi < 0.0 ? -1 : 0);
  const int k_sign = p.k > 0.0 ? 1 : (p.k < 0.0 ? -1 : 0);
  for (const FoldedConditionRow& row : folded_condition_rows()) {
    if (row.region != *m.region || row.k_sign != k_sign) continue;
    if (row.phi_order != 0 && row.phi_order != phi_sign) continue;
    if (!row.c_holds(p.c, x1, x2)) continue;
    m.row = row.index;
    m.predicted = row.derived;
    break;
  }
  if (!m.row) {
    throw Error(ErrorCode::NoRowMatches,
                "no row's hypotheses hold at x1*=" + format_real(x1) + ", c=" + format_real(p.c));
  }
  if (m.cls == StabilityClass::Degenerate || m.cls == StabilityClass::SaddleNode) {
    m.verdict = ConditionVerdict::Inconclusive;
  } else {
    const FoldedType got = m.cls == StabilityClass::Saddle ? FoldedType::Saddle : FoldedType::NodeOrFocus;
    m.verdict = got == *m.predicted ? ConditionVerdict::Consistent : ConditionVerdict::Inconsistent;
  }
  return m;
}

// ---------------------------------------------------------------------------

DoubleFoldReport double_fold_jacobian(const Params& p, bool same_sign, int sigma) {
  p.validate();
  require_symmetric(p, "double-fold analysis");
  require_sigma(sigma);
  DoubleFoldReport r;
  r.same_sign = same_sign;
  r.sigma = sigma;
  const double xs = sigma * kFold;
  r.x1 = xs;
  r.x2 = same_sign ? xs : -xs;
  const double dd = phi_double_prime(xs);
  if (same_sign) {
    const double lam = dd * (xs - p.b * phi(xs) - p.c);
    r.matrix << 0.0, lam, lam, 0.0;
  } else {
    const double bb = p.b + 2.0 * p.k;
    r.matrix << 0.0, -dd * (xs - bb * phi(xs) - p.c), -dd * (xs - bb * phi(xs) + p.c), 0.0;
  }
  r.det = r.matrix.determinant();
  r.trace = 0.0;
  r.cls = classify_trace_det(r.det, r.trace);

  const double f = kFold;
  if (same_sign) {
    const double thr = f - p.b * phi(f);
    const double sc = sigma * p.c;
    if (sc < thr) {
      r.condition = DoubleFoldCondition::I;
      r.verdict = CanardVerdict::CanardPossible;
    } else if (sc > thr) {
      r.condition = DoubleFoldCondition::III;
      r.verdict = CanardVerdict::NoCanard;
    }
  } else {
    const double bb = p.b + 2.0 * p.k;
    const double beta = f - bb * phi(f);
    if (bb < 0.375 && std::abs(p.c) < beta) {
      r.condition = DoubleFoldCondition::II;
      r.verdict = CanardVerdict::CanardPossible;
    } else if (bb > 0.375 && std::abs(p.c) < -beta) {
      r.condition = DoubleFoldCondition::IV;
      r.verdict = CanardVerdict::NoCanard;
    }
  }
  return r;
}

bool folded_node_check(const Params& p, int sigma) {
  require_sigma(sigma);
  if (p.b != 0.0) throw Error(ErrorCode::InvalidParams, "the node check requires b = 0");
  if (!(p.k > 0.0) || !(sigma * p.c < kFold)) return false;
  for (const FoldedEquilibrium& fe : find_folded_equilibria(p, sigma, FoldedVariable::Second)) {
    if (!(sigma * fe.x1_star > kFold + kDefaultFoldTol)) continue;
    if (fe.det > 0.0 && fe.det < 0.25) return true;
  }
  return false;
}

double jump_target(double x_fold) {
  if (std::abs(std::abs(x_fold) - kFold) > kDefaultFoldTol) {
    throw Error(ErrorCode::NotAFoldPoint, "x=" + format_real(x_fold) + " is not on a fold line");
  }
  return -2.0 * x_fold;
}

// ---------------------------------------------------------------------------

namespace {

using V3 = detail::Vec<3>;

struct ArcEnd {
  enum Kind { Fold1, Fold2, Equilibrium, TimeOut } kind;
  V3 y;
};

// One slow arc in rescaled time tau with dt = m dtau, m = min(|phi'(x1)|, |phi'(x2)|),
// state (x1, x2, t). m > 0 inside A, and unlike the F rescaling it lets an
// orbit on a symmetry line reach the double fold in finite tau.
ArcEnd run_arc(const Params& p, const V3& start, const SingularOrbitOptions& opt, SlowArc& arc) {
  auto f = [&p](const V3& v) {
    const auto [n1, n2] = slow_numerators(p, v[0], v[1]);
    const double d1 = phi_prime(v[0]);
    const double d2 = phi_prime(v[1]);
    const double m = std::min(std::abs(d1), std::abs(d2));
    return V3{m / d1 * n1, m / d2 * n2, m};
  };
  detail::DormandPrinceStepper<3> stepper(f);
  const double t0 = start[2];
  auto speed = [&p](const V3& v) {
    const auto [n1, n2] = slow_numerators(p, v[0], v[1]);
    return std::max(std::abs(n1), std::abs(n2));
  };
  std::vector<detail::ScalarEvent<3>> events = {
      {0, [](const V3& v) { return v[0] * v[0] - kFold * kFold; }, -1, true},
      {1, [](const V3& v) { return v[1] * v[1] - kFold * kFold; }, -1, true},
      {2, [&](const V3& v) { return speed(v) - opt.equilibrium_tol; }, -1, true},
      {3, [&](const V3& v) { return v[2] - t0 - opt.max_time_per_arc; }, +1, true},
  };
  detail::DriveOptions<3> dopt;
  dopt.rtol = opt.rtol;
  dopt.atol = opt.atol;
  dopt.t_end = 1e12;
  dopt.event_time_tol = 1e-14;

  ArcEnd end{ArcEnd::TimeOut, start};
  if (speed(start) <= opt.equilibrium_tol) {
    end.kind = ArcEnd::Equilibrium;
    return end;
  }
  const auto res = detail::drive<3>(stepper, start, dopt, events);
  for (std::size_t i = 1; i < res.t.size(); ++i) {
    const V3& v = res.y[i];
    arc.times.push_back(v[2]);
    arc.states.push_back({v[0], v[1], phi(v[0]), phi(v[1])});
  }
  end.y = res.y.back();
  if (res.stopped_by_event && !res.events.empty()) {
    switch (res.events.back().id) {
      case 0: end.kind = ArcEnd::Fold1; break;
      case 1: end.kind = ArcEnd::Fold2; break;
      case 2: end.kind = ArcEnd::Equilibrium; break;
      default: end.kind = ArcEnd::TimeOut; break;
    }
  }
  return end;
}

double snap_to_fold(double x) { return x > 0.0 ? kFold : -kFold; }

}  // namespace

SingularOrbit singular_orbit(const Params& p, std::array<double, 2> x0, int arcs,
                             const SingularOrbitOptions& opt) {
  p.validate();
  if (arcs < 1) throw Error(ErrorCode::InvalidConfig, "singular orbit needs at least one arc");
  if (!is_attracting(classify_region(x0[0], x0[1]))) {
    throw Error(ErrorCode::InvalidConfig, "singular orbit must start in the attracting region A");
  }
  SingularOrbit orbit;
  V3 cur{x0[0], x0[1], 0.0};
  State first{x0[0], x0[1], phi(x0[0]), phi(x0[1])};

  for (int n = 0; n < arcs; ++n) {
    SlowArc arc;
    arc.times.push_back(cur[2]);
    arc.states.push_back(first);
    const ArcEnd end = run_arc(p, cur, opt, arc);
    if (end.kind == ArcEnd::Equilibrium || end.kind == ArcEnd::TimeOut) {
      orbit.arcs.push_back(std::move(arc));
      orbit.termination = end.kind == ArcEnd::Equilibrium ? OrbitTermination::SlowEquilibrium
                                                          : OrbitTermination::TimeLimit;
      return orbit;
    }

    double x1 = end.y[0];
    double x2 = end.y[1];
    const double t = end.y[2];
    const bool other_on_fold = end.kind == ArcEnd::Fold1
                                   ? std::abs(std::abs(x2) - kFold) < opt.double_fold_tol
                                   : std::abs(std::abs(x1) - kFold) < opt.double_fold_tol;
    bool jump1 = end.kind == ArcEnd::Fold1;
    bool jump2 = end.kind == ArcEnd::Fold2;
    if (other_on_fold) {
      const bool on_symmetry = std::abs(x1 - x2) < opt.double_fold_tol ||
                               std::abs(x1 + x2) < opt.double_fold_tol;
      x1 = snap_to_fold(x1);
      x2 = snap_to_fold(x2);
      arc.states.back() = {x1, x2, phi(x1), phi(x2)};
      if (!on_symmetry) {
        orbit.arcs.push_back(std::move(arc));
        orbit.termination = OrbitTermination::DoubleFold;
        return orbit;
      }
      jump1 = jump2 = true;
    } else if (jump1) {
      x1 = snap_to_fold(x1);
    } else {
      x2 = snap_to_fold(x2);
    }
    const State from{x1, x2, phi(x1), phi(x2)};
    arc.states.back() = from;
    arc.times.back() = t;
    orbit.arcs.push_back(std::move(arc));

    FastJump jump;
    jump.t = t;
    jump.from = from;
    jump.to = from;
    if (jump1) jump.to.x1 = jump_target(x1);
    if (jump2) jump.to.x2 = jump_target(x2);
    jump.cell = jump1 && jump2 ? 0 : (jump1 ? 1 : 2);
    orbit.jumps.push_back(jump);

    cur = V3{jump.to.x1, jump.to.x2, t};
    first = jump.to;
  }
  orbit.termination = OrbitTermination::ArcLimit;
  return orbit;
}

}  // namespace fhn
