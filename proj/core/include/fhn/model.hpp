#pragma once

// Two FitzHugh-Nagumo cells coupled through their slow equations.
//
//   eps x1' = -y1 + phi(x1)
//   eps x2' = -y2 + phi(x2)
//       y1' = x1 - b y1 - c - k (y1 - y2)
//       y2' = x2 - b y2 - c - k (y2 - y1)
//
// with phi(x) = 4x - x^3.  Two further coupling modes change only the slow
// equations: one-directional forcing of cell 1 by cell 2, and a symmetric
// coupling in which cell 2 carries its own (b2, c2, k2).

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "fhn/error.hpp"

namespace fhn {

/// Fold value 2/sqrt(3): the zeros of phi'.
inline constexpr double kFold = 2.0 / std::numbers::sqrt3;
/// phi(2/sqrt(3)) = 16/(3 sqrt(3)), the local maximum of phi.
inline constexpr double kFoldPhi = 16.0 / (3.0 * std::numbers::sqrt3);

inline constexpr double phi(double x) { return 4.0 * x - x * x * x; }
inline constexpr double phi_prime(double x) { return 4.0 - 3.0 * x * x; }
inline constexpr double phi_double_prime(double x) { return -6.0 * x; }

struct SymmetricBidirectional {
  friend bool operator==(const SymmetricBidirectional&, const SymmetricBidirectional&) = default;
};

/// y1' = x1 - b y1 - c + k y2,  y2' = x2 - b y2 - c.
struct AsymmetricForcing {
  friend bool operator==(const AsymmetricForcing&, const AsymmetricForcing&) = default;
};

/// Cell 2 uses (b2, c2, k2) in its slow equation; cell 1 keeps (b, c, k).
struct PerturbedSecondCell {
  double b2 = 0.0;
  double c2 = 0.0;
  double k2 = 0.0;
  friend bool operator==(const PerturbedSecondCell&, const PerturbedSecondCell&) = default;
};

using CouplingMode = std::variant<SymmetricBidirectional, AsymmetricForcing, PerturbedSecondCell>;

struct Params {
  double b = 0.0;
  double c = 0.0;
  double k = 1.0;
  double epsilon = 0.01;
  CouplingMode mode = SymmetricBidirectional{};

  bool symmetric() const { return std::holds_alternative<SymmetricBidirectional>(mode); }

  /// Throws InvalidParams unless epsilon > 0 and every field is finite.
  void validate() const;

  friend bool operator==(const Params&, const Params&) = default;
};

std::string mode_name(const CouplingMode& mode);

/// A point (x1, x2, y1, y2) of phase space. Also used for velocities.
struct State {
  double x1 = 0.0;
  double x2 = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;

  Eigen::Vector4d vec() const { return {x1, x2, y1, y2}; }
  static State from(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
  bool finite() const {
    return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(y1) && std::isfinite(y2);
  }

  friend bool operator==(const State&, const State&) = default;
};

/// Sum/difference coordinates: z1 = x1+x2, z2 = y1+y2, z3 = x1-x2, z4 = y1-y2.
/// Fix(gamma) is {z3 = z4 = 0}; Fix(delta) is {z1 = z2 = 0}.
struct ZState {
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;
  double z4 = 0.0;

  friend bool operator==(const ZState&, const ZState&) = default;
};

ZState to_z(const State& s);
State from_z(const ZState& z);

/// Time-t derivative of the full system; the fast components are already
/// divided by epsilon.
State rhs(const Params& p, const State& s);

/// The symmetric-mode vector field written in sum/difference coordinates.
/// Throws InvalidParams for any other coupling mode.
ZState rhs_z(const Params& p, const ZState& z);

/// Analytic 4x4 derivative of rhs, rows/columns ordered (x1, x2, y1, y2).
Eigen::Matrix4d jacobian(const Params& p, const State& s);

/// Swap symmetry (x1, x2, y1, y2) -> (x2, x1, y2, y1).
inline State gamma(const State& s) { return {s.x2, s.x1, s.y2, s.y1}; }

/// Swap-and-negate symmetry (x1, x2, y1, y2) -> (-x2, -x1, -y2, -y1);
/// a symmetry of the symmetric mode only when c = 0.
inline State delta(const State& s) { return {-s.x2, -s.x1, -s.y2, -s.y1}; }

}  // namespace fhn
