#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "fhn/reduced_flow.hpp"
#include "oracles.hpp"

using namespace fhn;

namespace {

Eigen::Matrix2d fd_H(const Params& p, double x1, double x2, FoldedVariable v) {
  return oracle::fd_jacobian<2, 2>(
      [&](const Eigen::Vector2d& x) {
        const auto [a, b] = H(p, x[0], x[1], v);
        return Eigen::Vector2d(a, b);
      },
      Eigen::Vector2d(x1, x2), 1e-6);
}

// Folded-condition roots straight from k phi(x) = c + (b + k) phi(x_f) - x_f.
std::vector<double> folded_roots_oracle(const Params& p, int sigma) {
  const double xf = sigma * oracle::kF;
  const double rhs = p.c + (p.b + p.k) * oracle::cubic(xf) - xf;
  return oracle::scan_roots([&](double x) { return p.k * oracle::cubic(x) - rhs; }, -6, 6, 60000);
}

}  // namespace

TEST_CASE("trace-determinant chart") {
  CHECK(classify_trace_det(-1.0, 1.0) == StabilityClass::Saddle);
  CHECK(classify_trace_det(0.2, 1.0) == StabilityClass::UnstableNode);
  CHECK(classify_trace_det(0.3, 1.0) == StabilityClass::UnstableFocus);
  CHECK(classify_trace_det(0.25, 1.0) == StabilityClass::Degenerate);
  CHECK(classify_trace_det(0.0, 1.0) == StabilityClass::SaddleNode);
  CHECK(classify_trace_det(0.0, 0.0) == StabilityClass::Degenerate);
  CHECK(classify_trace_det(2.0, 0.0) == StabilityClass::Center);
  CHECK(classify_trace_det(0.2, -1.0) == StabilityClass::StableNode);
  CHECK(classify_trace_det(0.3, -1.0) == StabilityClass::StableFocus);
}

TEST_CASE("depressed cubic roots against a bracketing scan") {
  oracle::Rng r(99);
  for (int i = 0; i < 300; ++i) {
    const double a = r.uniform(-6, 6);
    const double b = r.uniform(-6, 6);
    const auto roots = depressed_cubic_roots(a, b);
    const auto ref = oracle::scan_roots([&](double t) { return t * t * t + a * t + b; }, -10, 10);
    REQUIRE(roots.size() == ref.size());
    for (std::size_t j = 0; j < ref.size(); ++j) CHECK(roots[j] == doctest::Approx(ref[j]).epsilon(1e-9));
  }
  // double and triple roots
  auto d = depressed_cubic_roots(-3.0, 2.0);  // (t - 1)^2 (t + 2)
  REQUIRE(d.size() == 2);
  CHECK(d[0] == doctest::Approx(-2.0));
  CHECK(d[1] == doctest::Approx(1.0));
  d = depressed_cubic_roots(0.0, 0.0);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == doctest::Approx(0.0));
}

TEST_CASE("folded equilibria, b = 0, c = 0, k = 1") {
  const Params p{0.0, 0.0, 1.0, 0.01};
  const auto fes = find_folded_equilibria(p, 1, FoldedVariable::Second);
  const auto ref = folded_roots_oracle(p, 1);
  REQUIRE(fes.size() == 3);
  REQUIRE(ref.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(fes[i].x1_star == doctest::Approx(ref[i]).epsilon(1e-12));
    CHECK(fes[i].x2_star == doctest::Approx(kFold));
    CHECK(folded_condition_residual(p, fes[i]) < 1e-12);
  }
  CHECK(fes[2].x1_star == doctest::Approx(1.6918982612).epsilon(1e-10));
  CHECK(fes[2].boundary == RegionLabel::A1);
  CHECK(fes[0].x1_star == doctest::Approx(-2.20723903555).epsilon(1e-10));
  CHECK(fes[0].boundary == RegionLabel::A2);
  CHECK(fes[0].cls == StabilityClass::Saddle);
  CHECK(fes[1].outside_A());
  // every folded equilibrium has trace 1, so it is never attracting
  for (const auto& fe : fes) CHECK(fe.trace == doctest::Approx(1.0));
}

TEST_CASE("folds in x1 mirror folds in x2") {
  const Params p{0.1, 0.3, 0.7, 0.01};
  for (int sigma : {1, -1}) {
    const auto a = find_folded_equilibria(p, sigma, FoldedVariable::Second);
    const auto b = find_folded_equilibria(p, sigma, FoldedVariable::First);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].x1_star == doctest::Approx(b[i].x2_star));
      CHECK(a[i].det == doctest::Approx(b[i].det));
      CHECK(a[i].cls == b[i].cls);
    }
  }
}

TEST_CASE("degenerate root at the double fold") {
  const Params p{0.0, kFold, 1.0, 0.01};
  const auto fes = find_folded_equilibria(p, 1, FoldedVariable::Second);
  bool found = false;
  for (const auto& fe : fes) {
    if (fe.at_double_fold) {
      found = true;
      CHECK(fe.x1_star == doctest::Approx(kFold).epsilon(1e-7));
      CHECK(fe.cls == StabilityClass::Degenerate);
    }
  }
  CHECK(found);
}

TEST_CASE("zero coupling and non-symmetric modes are rejected") {
  try {
    find_folded_equilibria(Params{0, 0, 0, 0.1}, 1, FoldedVariable::Second);
    FAIL("expected ZeroCoupling");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroCoupling);
  }
  CHECK_THROWS_AS(find_folded_equilibria(Params{0, 0, 1, 0.1, AsymmetricForcing{}}, 1, FoldedVariable::Second),
                  Error);
}

TEST_CASE("DH: closed-form determinant and finite differences") {
  oracle::Rng r(17);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const Params p{r.uniform(-1, 1), r.uniform(-3, 3), r.uniform(-2, 2), 0.01};
    if (std::abs(p.k) < 1e-3) continue;
    for (int sigma : {1, -1}) {
      for (const auto& fe : find_folded_equilibria(p, sigma, FoldedVariable::Second)) {
        if (fe.at_double_fold || std::abs(std::abs(fe.x1_star) - kFold) < 1e-3) continue;
        const DhReport rep = jacobian_DH(p, fe);
        CHECK(oracle::close_rel(rep.det, rep.det_closed_form, 1e-10));
        CHECK(rep.trace == doctest::Approx(1.0).epsilon(1e-12));
        const Eigen::Matrix2d J = fd_H(p, fe.x1_star, fe.x2_star, FoldedVariable::Second);
        CHECK((J - rep.matrix).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, rep.matrix.cwiseAbs().maxCoeff()));
        ++checked;
      }
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("F equals phi'(x1) H, and the Jacobians match finite differences") {
  oracle::Rng r(23);
  for (int i = 0; i < 300; ++i) {
    const Params p{r.uniform(-1, 1), r.uniform(-2, 2), r.uniform(-1, 1), 0.01};
    const double x1 = r.uniform(-3, 3);
    const double x2 = r.uniform(-3, 3);
    if (std::abs(phi_prime(x1)) < 1e-3 || std::abs(phi_prime(x2)) < 1e-3) continue;
    const auto [h1, h2] = H(p, x1, x2);
    const auto [f1, f2] = F(p, x1, x2);
    CHECK(std::abs(f1 - phi_prime(x1) * h1) <= 1e-12 * std::max(1.0, std::abs(f1)));
    CHECK(std::abs(f2 - phi_prime(x1) * h2) <= 1e-12 * std::max(1.0, std::abs(f2)));

    const Eigen::Matrix2d JF = jacobian_F(p, x1, x2);
    const Eigen::Matrix2d JFfd = oracle::fd_jacobian<2, 2>(
        [&](const Eigen::Vector2d& x) {
          const auto [a, b] = F(p, x[0], x[1]);
          return Eigen::Vector2d(a, b);
        },
        Eigen::Vector2d(x1, x2));
    CHECK((JF - JFfd).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, JF.cwiseAbs().maxCoeff()));

    for (auto v : {FoldedVariable::Second, FoldedVariable::First}) {
      const Eigen::Matrix2d JH = jacobian_H(p, x1, x2, v);
      const Eigen::Matrix2d JHfd = fd_H(p, x1, x2, v);
      CHECK((JH - JHfd).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, JH.cwiseAbs().maxCoeff()));
    }
    const auto [s1, s2] = slow_rhs_on_C0(p, x1, x2);
    CHECK(s1 == doctest::Approx(h1 / phi_prime(x2)));
    CHECK(s2 == doctest::Approx(h2 / phi_prime(x2)));
  }
  CHECK_THROWS_AS(slow_rhs_on_C0(Params{}, kFold, 2.0), Error);
  CHECK(rescaling_sign_F(2.0, 0.0) < 0);
  CHECK(rescaling_sign_H(2.0, 0.0) > 0);
}

TEST_CASE("slow numerators are y' on C0") {
  const Params p{0.2, 0.1, 0.3, 0.01};
  const State s = lift(1.4, -2.1).state();
  const auto [n1, n2] = slow_numerators(p, 1.4, -2.1);
  CHECK(n1 == doctest::Approx(rhs(p, s).y1));
  CHECK(n2 == doctest::Approx(rhs(p, s).y2));
}

TEST_CASE("sufficient-condition rows: row set and errata") {
  const auto& rows = folded_condition_rows();
  REQUIRE(rows.size() == 18);
  for (const auto& row : rows) {
    const bool expect_erratum = row.index == 6 || row.index == 9;
    CHECK_MESSAGE(row.erratum() == expect_erratum, "row " << row.index);
  }
}

TEST_CASE("sufficient-condition classification of concrete folded equilibria") {
  // b = 0, c = 0, k = 1: the dA1* root is a focus with c < f (row 1)
  const Params p{0.0, 0.0, 1.0, 0.01};
  const auto fes = find_folded_equilibria(p, 1, FoldedVariable::Second);
  const FoldedConditionMatch m = classify_folded_conditions(p, fes[2]);
  CHECK(m.row == 1);
  CHECK(m.region == RegionLabel::A1);
  CHECK(m.predicted == FoldedType::NodeOrFocus);
  CHECK(m.verdict == ConditionVerdict::Consistent);
  // on the c = 0 boundary between rows no hypothesis holds strictly
  CHECK_THROWS_AS(classify_folded_conditions(p, fes[0]), Error);
  // b != 0: not applicable
  const Params pb{0.1, 0.0, 1.0, 0.01};
  const auto fb = find_folded_equilibria(pb, 1, FoldedVariable::Second);
  CHECK(classify_folded_conditions(pb, fb.back()).verdict == ConditionVerdict::NotApplicable);
}

TEST_CASE("double-fold report: closed form, conditions and verdicts") {
  // opposite signs, b + 2k = 0.3 < 3/8 and c = 0: condition (ii)
  const Params p{0.2, 0.0, 0.05, 0.01};
  for (int sigma : {1, -1}) {
    const auto rep = double_fold_jacobian(p, false, sigma);
    CHECK(rep.condition == DoubleFoldCondition::II);
    CHECK(rep.verdict == CanardVerdict::CanardPossible);
    CHECK(rep.cls == StabilityClass::Saddle);
    const Eigen::Matrix2d J = jacobian_F(p, rep.x1, rep.x2);
    CHECK((J - rep.matrix).cwiseAbs().maxCoeff() < 1e-12);
  }
  // same signs, sigma c > f - b phi(f): condition (iii)
  const auto iii = double_fold_jacobian(Params{0.0, 2.0, 1.0, 0.01}, true, 1);
  CHECK(iii.condition == DoubleFoldCondition::III);
  CHECK(iii.verdict == CanardVerdict::NoCanard);
  // opposite, b + 2k > 3/8 and |c| < -beta: condition (iv)
  const auto iv = double_fold_jacobian(Params{0.0, 0.0, 1.0, 0.01}, false, 1);
  CHECK(iv.condition == DoubleFoldCondition::IV);
  CHECK(iv.verdict == CanardVerdict::NoCanard);
  // opposite, |c| beyond |beta|: neither
  const auto none = double_fold_jacobian(Params{0.2, 1.5, 0.05, 0.01}, false, 1);
  CHECK(none.condition == DoubleFoldCondition::None);
  CHECK(none.verdict == CanardVerdict::Inconclusive);
}

TEST_CASE("folded node check") {
  CHECK(folded_node_check(Params{0.0, kFold - 0.001, 1.0, 0.01}, 1));
  CHECK_FALSE(folded_node_check(Params{0.0, 0.0, 1.0, 0.01}, 1));
  CHECK_FALSE(folded_node_check(Params{0.0, kFold + 0.1, 1.0, 0.01}, 1));
  CHECK_FALSE(folded_node_check(Params{0.0, kFold - 0.001, -1.0, 0.01}, 1));
  CHECK(folded_node_check(Params{0.0, -kFold + 0.001, 1.0, 0.01}, -1));
  CHECK_THROWS_AS(folded_node_check(Params{0.1, 0.0, 1.0, 0.01}, 1), Error);
}

TEST_CASE("jump targets") {
  CHECK(jump_target(kFold) == doctest::Approx(-4.0 / std::sqrt(3.0)));
  CHECK(jump_target(-kFold) == doctest::Approx(4.0 / std::sqrt(3.0)));
  CHECK(oracle::cubic(jump_target(kFold)) == doctest::Approx(oracle::cubic(kFold)).epsilon(1e-14));
  try {
    jump_target(0.5);
    FAIL("expected NotAFoldPoint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAFoldPoint);
  }
}

TEST_CASE("singular orbits") {
  SUBCASE("start must be attracting") {
    CHECK_THROWS_AS(singular_orbit(Params{0, -2, 1, 0.01}, {0.0, 2.0}, 3), Error);
  }
  SUBCASE("relaxation to the stable equilibrium") {
    const auto o = singular_orbit(Params{0, -2, 1, 0.01}, {2.5, -1.6}, 6);
    CHECK(o.termination == OrbitTermination::SlowEquilibrium);
    REQUIRE(!o.jumps.empty());
    const auto& last = o.arcs.back().states.back();
    CHECK(last.x1 == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(last.x2 == doctest::Approx(-2.0).epsilon(1e-6));
  }
  SUBCASE("jumps keep y and land at -2 x_fold") {
    const auto o = singular_orbit(Params{0.1, 0.0, 0.1, 0.01}, {-2.0, 2.0}, 6);
    REQUIRE(o.jumps.size() >= 3);
    for (std::size_t i = 0; i < o.jumps.size(); ++i) {
      const auto& j = o.jumps[i];
      CHECK(j.cell == 0);
      CHECK(j.to.y1 == j.from.y1);
      CHECK(j.to.y2 == j.from.y2);
      CHECK(j.to.x1 == -2.0 * j.from.x1);
      CHECK(std::abs(std::abs(j.to.x1) - 4.0 / std::sqrt(3.0)) < 1e-12);
      if (i + 1 < o.arcs.size()) CHECK(o.arcs[i + 1].states.front() == j.to);
    }
  }
  SUBCASE("a single cell jumping off the symmetry lines") {
    const auto o = singular_orbit(Params{0.5, 0.0, 1.0, 0.01}, {-1.3, 2.5}, 4);
    REQUIRE(!o.jumps.empty());
    CHECK(o.jumps[0].cell != 0);
  }
}

TEST_CASE("desingularized orbit") {
  const Params p{0.0, -0.519935054, 1.0, 0.5};
  const auto fwd = desingularized_orbit(p, {1.3, 1.0}, 1.0);
  REQUIRE(fwd.size() > 2);
  CHECK(fwd.front().s == 0.0);
  CHECK(fwd.back().s <= 1.0 + 1e-12);
  const auto bwd = desingularized_orbit(p, {1.3, 1.0}, -1.0);
  CHECK(bwd.back().s < 0.0);
  // first step direction follows F
  const auto [f1, f2] = F(p, 1.3, 1.0);
  CHECK((fwd[1].x1 - 1.3) * f1 > 0);
  CHECK((bwd[1].x2 - 1.0) * f2 < 0);
  // orbits stop at the bounding box
  const auto out = desingularized_orbit(p, {2.9, 2.9}, 50.0, 3.0);
  CHECK(std::max(std::abs(out.back().x1), std::abs(out.back().x2)) <= 3.0 + 1e-6);
}
