#include "fhn/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

namespace fhn {

std::string to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::A1: return "A1";
    case RegionLabel::A2: return "A2";
    case RegionLabel::A3: return "A3";
    case RegionLabel::A4: return "A4";
    case RegionLabel::S1: return "S1";
    case RegionLabel::S2: return "S2";
    case RegionLabel::S3: return "S3";
    case RegionLabel::S4: return "S4";
    case RegionLabel::R: return "R";
    case RegionLabel::FoldLine: return "FoldLine";
    case RegionLabel::DoubleFold: return "DoubleFold";
  }
  return "?";
}

RegionLabel region_from_string(const std::string& s) {
  static constexpr std::array all = {RegionLabel::A1, RegionLabel::A2, RegionLabel::A3,
                                     RegionLabel::A4, RegionLabel::S1, RegionLabel::S2,
                                     RegionLabel::S3, RegionLabel::S4, RegionLabel::R,
                                     RegionLabel::FoldLine, RegionLabel::DoubleFold};
  for (auto l : all) {
    if (to_string(l) == s) return l;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown region label '" + s + "'");
}

CriticalPoint lift(double x1, double x2) { return {x1, x2, phi(x1), phi(x2)}; }

RegionLabel classify_region(double x1, double x2, double tol) {
  const bool fold1 = std::abs(std::abs(x1) - kFold) < tol;
  const bool fold2 = std::abs(std::abs(x2) - kFold) < tol;
  if (fold1 && fold2) return RegionLabel::DoubleFold;
  if (fold1 || fold2) return RegionLabel::FoldLine;

  const bool out1 = std::abs(x1) > kFold;
  const bool out2 = std::abs(x2) > kFold;
  if (out1 && out2) {
    if (x1 > 0.0) return x2 > 0.0 ? RegionLabel::A1 : RegionLabel::A4;
    return x2 > 0.0 ? RegionLabel::A2 : RegionLabel::A3;
  }
  if (out1) return x1 > 0.0 ? RegionLabel::S1 : RegionLabel::S3;
  if (out2) return x2 > 0.0 ? RegionLabel::S2 : RegionLabel::S4;
  return RegionLabel::R;
}

std::pair<double, double> fast_jacobian_eigenvalues(double x1, double x2) {
  return {phi_prime(x1), phi_prime(x2)};
}

std::vector<double> slow_manifold_residual(const Trajectory& traj) {
  std::vector<double> r;
  r.reserve(traj.size());
  for (const State& s : traj.states) {
    r.push_back(std::max(std::abs(s.y1 - phi(s.x1)), std::abs(s.y2 - phi(s.x2))));
  }
  return r;
}

namespace {

// |x'| from stored derivatives, or by finite differences when they are absent.
double fast_speed(const Trajectory& traj, std::size_t i) {
  if (traj.derivatives.size() == traj.size()) {
    const State& d = traj.derivatives[i];
    return std::max(std::abs(d.x1), std::abs(d.x2));
  }
  const std::size_t j0 = i == 0 ? 0 : i - 1;
  const std::size_t j1 = i + 1 < traj.size() ? i + 1 : i;
  const double dt = traj.times[j1] - traj.times[j0];
  return std::max(std::abs(traj.states[j1].x1 - traj.states[j0].x1),
                  std::abs(traj.states[j1].x2 - traj.states[j0].x2)) / dt;
}

}  // namespace

std::vector<ResidualSegment> residual_segments(const Trajectory& traj, double jump_speed) {
  const auto residual = slow_manifold_residual(traj);
  std::vector<ResidualSegment> segments;
  bool open = false;
  ResidualSegment cur;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const bool slow = fast_speed(traj, i) <= jump_speed;
    if (slow) {
      if (!open) {
        cur = ResidualSegment{i, i + 1, traj.times[i], traj.times[i], residual[i]};
        open = true;
      } else {
        cur.end = i + 1;
        cur.t_end = traj.times[i];
        cur.max_residual = std::max(cur.max_residual, residual[i]);
      }
    } else if (open) {
      segments.push_back(cur);
      open = false;
    }
  }
  if (open) segments.push_back(cur);
  return segments;
}

double attracting_residual_max(const Trajectory& traj, double settle_time, double fold_margin) {
  const auto residual = slow_manifold_residual(traj);
  double worst = 0.0;
  double entered = 0.0;
  bool inside = false;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State& s = traj.states[i];
    const bool in_a = std::abs(s.x1) > kFold + fold_margin && std::abs(s.x2) > kFold + fold_margin;
    if (in_a && !inside) entered = traj.times[i];
    inside = in_a;
    if (in_a && traj.times[i] - entered >= settle_time) worst = std::max(worst, residual[i]);
  }
  return worst;
}

void write_region_grid_csv(std::ostream& os, double x1_lo, double x1_hi, int n1, double x2_lo,
                           double x2_hi, int n2, double tol) {
  if (n1 < 1 || n2 < 1) throw Error(ErrorCode::InvalidConfig, "region grid needs n1, n2 >= 1");
  os << "x1,x2,label\n";
  for (int i = 0; i < n1; ++i) {
    const double x1 = n1 == 1 ? x1_lo : x1_lo + (x1_hi - x1_lo) * i / (n1 - 1);
    for (int j = 0; j < n2; ++j) {
      const double x2 = n2 == 1 ? x2_lo : x2_lo + (x2_hi - x2_lo) * j / (n2 - 1);
      os << format_real(x1) << ',' << format_real(x2) << ',' << to_string(classify_region(x1, x2, tol))
         << '\n';
    }
  }
}

}  // namespace fhn
