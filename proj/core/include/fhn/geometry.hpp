#pragma once

// Critical manifold C0 = {y_i = phi(x_i)} and its decomposition by the
// stability of the fast layer. In the (x1, x2) plane the fold lines
// |x_i| = 2/sqrt(3) cut C0 into nine regions:
//
//   A1: x1 >  f, x2 >  f      S1: x1 >  f, |x2| < f
//   A2: x1 < -f, x2 >  f      S2: |x1| < f, x2 >  f
//   A3: x1 < -f, x2 < -f      S3: x1 < -f, |x2| < f
//   A4: x1 >  f, x2 < -f      S4: |x1| < f, x2 < -f
//   R : |x1| < f, |x2| < f
//
// with f = 2/sqrt(3). A is attracting, S is of saddle type, R repelling.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fhn/integrator.hpp"
#include "fhn/model.hpp"

namespace fhn {

enum class RegionLabel { A1, A2, A3, A4, S1, S2, S3, S4, R, FoldLine, DoubleFold };

inline constexpr double kDefaultFoldTol = 1e-9;

std::string to_string(RegionLabel label);
RegionLabel region_from_string(const std::string& s);

inline bool is_attracting(RegionLabel l) {
  return l == RegionLabel::A1 || l == RegionLabel::A2 || l == RegionLabel::A3 || l == RegionLabel::A4;
}
inline bool is_saddle(RegionLabel l) {
  return l == RegionLabel::S1 || l == RegionLabel::S2 || l == RegionLabel::S3 || l == RegionLabel::S4;
}
/// S or R: where C0 does not attract the fast flow.
inline bool is_non_attracting(RegionLabel l) { return is_saddle(l) || l == RegionLabel::R; }

/// A point of C0; y is derived from x so it lies on C0 exactly.
struct CriticalPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;

  State state() const { return {x1, x2, y1, y2}; }
};

CriticalPoint lift(double x1, double x2);

RegionLabel classify_region(double x1, double x2, double tol = kDefaultFoldTol);

/// Eigenvalues phi'(x1), phi'(x2) of the fast-layer Jacobian diag(phi'),
/// up to the positive factor 1/epsilon.
std::pair<double, double> fast_jacobian_eigenvalues(double x1, double x2);

/// Per-sample max(|y1 - phi(x1)|, |y2 - phi(x2)|).
std::vector<double> slow_manifold_residual(const Trajectory& traj);

struct ResidualSegment {
  std::size_t begin = 0;  // first sample index
  std::size_t end = 0;    // one past the last sample index
  double t_start = 0.0;
  double t_end = 0.0;
  double max_residual = 0.0;
};

/// Splits a trajectory into slow segments separated by fast jumps. A sample
/// belongs to a jump when max(|x1'|, |x2'|) exceeds `jump_speed`; every
/// maximal run of slow samples is one segment.
std::vector<ResidualSegment> residual_segments(const Trajectory& traj, double jump_speed);

/// Maximum residual over samples lying in A at least `fold_margin` from the
/// fold lines and at least `settle_time` after the trajectory last entered
/// that set (the landing transient after a jump is excluded). 0 when none.
double attracting_residual_max(const Trajectory& traj, double settle_time, double fold_margin);

/// CSV "x1,x2,label" over an n1 x n2 lattice covering [x1_lo, x1_hi] x [x2_lo, x2_hi].
void write_region_grid_csv(std::ostream& os, double x1_lo, double x1_hi, int n1, double x2_lo,
                           double x2_hi, int n2, double tol = kDefaultFoldTol);

}  // namespace fhn
