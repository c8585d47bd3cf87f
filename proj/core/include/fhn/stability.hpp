#pragma once

// Linear stability transverse to the symmetry planes, the resulting
// synchrony predicates, and equilibria of the full system.
//
// Along Fix(gamma) the difference coordinates (z3, z4) obey, to first order,
//   eps z3' = phi'(x) z3 - z4,   z4' = z3 - (b + 2k) z4,
// and along Fix(delta) the sum coordinates obey the same with b in place of b + 2k.

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "fhn/integrator.hpp"
#include "fhn/model.hpp"

namespace fhn {

struct TransverseReport {
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
  double det = 0.0;  // from the matrix
  double trace = 0.0;
  double det_closed_form = 0.0;
  double trace_closed_form = 0.0;
  bool attracting = false;           // det > 0 and trace < 0
  bool normally_hyperbolic = false;  // no eigenvalue on the imaginary axis
};

/// Transverse matrix to Fix(gamma) at the synchronous point with fast value x.
TransverseReport n_gamma(const Params& p, double x);
/// Transverse matrix to Fix(delta) at the antisynchronous point with fast value x.
TransverseReport n_delta(const Params& p, double x);

/// k > -b/2 (strict) or k >= -b/2.
bool synchrony_attracting(const Params& p, bool strict = true);

struct AntisynchronyReport {
  bool attracting = false;  // b > 0 (strict) or b >= 0
  bool exact = false;       // c == 0: Fix(delta) is invariant
};

AntisynchronyReport antisynchrony_attracting(const Params& p, bool strict = true);

enum class EquilibriumStability { Sink, Source, SaddleLike, Nonhyperbolic };

std::string to_string(EquilibriumStability s);

struct Equilibrium {
  State state;
  std::vector<std::complex<double>> eigenvalues;  // sorted by (real, imag)
  EquilibriumStability stability = EquilibriumStability::Nonhyperbolic;
  double residual = 0.0;  // max |rhs| component
};

/// Classification from 4x4 eigenvalues; real parts within tol count as zero.
EquilibriumStability classify_eigenvalues(const std::vector<std::complex<double>>& ev,
                                          double tol = 1e-9);

/// All equilibria, by Newton refinement from a 60 x 60 grid on [-3, 3]^2,
/// deduplicated at distance 1e-6 and sorted by (x1, x2).
std::vector<Equilibrium> find_equilibria(const Params& p);

/// Real roots of x - b phi(x) - c = 0: the equilibria inside Fix(gamma).
std::vector<double> synchrony_plane_equilibria(const Params& p);

struct SynchronyPrecision {
  double delta_sync = 0.0;  // sup max(|x1 - x2|, |y1 - y2|)
  double delta_anti = 0.0;  // sup max(|x1 + x2|, |y1 + y2|)
};

/// Suprema over samples with t >= t0. Throws InvalidConfig if t0 is outside the span.
SynchronyPrecision synchrony_precision(const Trajectory& traj, double t0);

}  // namespace fhn
