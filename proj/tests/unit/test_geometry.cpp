#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "fhn/geometry.hpp"
#include "oracles.hpp"

using namespace fhn;

TEST_CASE("region labels at representative points") {
  CHECK(classify_region(2, 2) == RegionLabel::A1);
  CHECK(classify_region(-2, 2) == RegionLabel::A2);
  CHECK(classify_region(-2, -2) == RegionLabel::A3);
  CHECK(classify_region(2, -2) == RegionLabel::A4);
  CHECK(classify_region(2, 0) == RegionLabel::S1);
  CHECK(classify_region(0, 2) == RegionLabel::S2);
  CHECK(classify_region(-2, 0) == RegionLabel::S3);
  CHECK(classify_region(0, -2) == RegionLabel::S4);
  CHECK(classify_region(0, 0) == RegionLabel::R);
  CHECK(classify_region(kFold, 0.3) == RegionLabel::FoldLine);
  CHECK(classify_region(-2, -kFold) == RegionLabel::FoldLine);
  CHECK(classify_region(kFold, -kFold) == RegionLabel::DoubleFold);
  CHECK(classify_region(kFold + 1e-10, kFold) == RegionLabel::DoubleFold);
  CHECK(classify_region(kFold + 1e-6, 0) == RegionLabel::S1);
}

TEST_CASE("labels agree with the signs of the fast eigenvalues") {
  oracle::Rng r(21);
  for (int i = 0; i < 2000; ++i) {
    const double x1 = r.uniform(-3, 3);
    const double x2 = r.uniform(-3, 3);
    const auto [l1, l2] = fast_jacobian_eigenvalues(x1, x2);
    const RegionLabel lab = classify_region(x1, x2);
    if (lab == RegionLabel::FoldLine || lab == RegionLabel::DoubleFold) continue;
    const int negative = (l1 < 0) + (l2 < 0);
    if (negative == 2) CHECK(is_attracting(lab));
    if (negative == 1) CHECK(is_saddle(lab));
    if (negative == 0) CHECK(lab == RegionLabel::R);
  }
}

TEST_CASE("label strings round-trip") {
  for (auto l : {RegionLabel::A1, RegionLabel::A2, RegionLabel::A3, RegionLabel::A4, RegionLabel::S1,
                 RegionLabel::S2, RegionLabel::S3, RegionLabel::S4, RegionLabel::R, RegionLabel::FoldLine,
                 RegionLabel::DoubleFold}) {
    CHECK(region_from_string(to_string(l)) == l);
  }
  CHECK_THROWS_AS(region_from_string("Q7"), Error);
}

TEST_CASE("lift lands on C0") {
  const CriticalPoint c = lift(1.3, -2.2);
  CHECK(c.y1 == oracle::cubic(1.3));
  CHECK(c.y2 == oracle::cubic(-2.2));
  Trajectory tr;
  tr.times = {0.0, 1.0};
  tr.states = {c.state(), State{1.3, -2.2, c.y1 + 0.25, c.y2 - 0.5}};
  tr.derivatives = {State{}, State{}};
  const auto res = slow_manifold_residual(tr);
  CHECK(res[0] == 0.0);
  CHECK(res[1] == doctest::Approx(0.5));
}

TEST_CASE("residual segments split at fast jumps") {
  Trajectory tr;
  for (int i = 0; i < 10; ++i) {
    tr.times.push_back(i);
    tr.states.push_back(lift(2.0, 2.0).state());
    const double speed = (i == 4 || i == 5) ? 100.0 : 0.1;
    tr.derivatives.push_back(State{speed, 0, 0, 0});
  }
  tr.states[2].y1 += 0.01;
  tr.states[8].y2 += 0.03;
  const auto segs = residual_segments(tr, 1.0);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].begin == 0);
  CHECK(segs[0].end == 4);
  CHECK(segs[0].max_residual == doctest::Approx(0.01));
  CHECK(segs[1].begin == 6);
  CHECK(segs[1].max_residual == doctest::Approx(0.03));
}

TEST_CASE("attracting residual skips the landing transient and the fold margin") {
  Trajectory tr;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.1 * i;
    tr.times.push_back(t);
    State s = lift(2.0, -2.0).state();
    if (i < 3) s.y1 += 1.0;    // just landed
    if (i == 20) s.y2 += 0.2;  // inside, settled
    tr.states.push_back(s);
    tr.derivatives.push_back(State{});
  }
  CHECK(attracting_residual_max(tr, 0.5, 0.1) == doctest::Approx(0.2));
  CHECK(attracting_residual_max(tr, 0.0, 0.1) == doctest::Approx(1.0));
  // a trajectory sitting near the fold contributes nothing
  for (auto& s : tr.states) s = lift(kFold + 0.05, 2.0).state();
  CHECK(attracting_residual_max(tr, 0.5, 0.1) == 0.0);
}

TEST_CASE("region grid CSV") {
  std::ostringstream os;
  write_region_grid_csv(os, -3, 3, 4, -3, 3, 3);
  const std::string s = os.str();
  CHECK(s.rfind("x1,x2,label\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 12);
  CHECK(s.find("-3,-3,A3\n") != std::string::npos);
}
