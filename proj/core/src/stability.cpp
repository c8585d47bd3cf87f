#include "fhn/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "fhn/reduced_flow.hpp"

namespace fhn {

namespace {

TransverseReport transverse(const Params& p, double x, double damping) {
  p.validate();
  TransverseReport r;
  const double e = p.epsilon;
  const double dp = phi_prime(x);
  r.matrix << dp / e, -1.0 / e, 1.0, -damping;
  r.det = r.matrix.determinant();
  r.trace = r.matrix.trace();
  r.det_closed_form = -(1.0 / e) * (damping * dp - 1.0);
  r.trace_closed_form = dp / e - damping;
  r.attracting = r.det > 0.0 && r.trace < 0.0;
  r.normally_hyperbolic = r.det != 0.0 && !(r.trace == 0.0 && r.det > 0.0);
  return r;
}

}  // namespace

TransverseReport n_gamma(const Params& p, double x) { return transverse(p, x, p.b + 2.0 * p.k); }

TransverseReport n_delta(const Params& p, double x) { return transverse(p, x, p.b); }

bool synchrony_attracting(const Params& p, bool strict) {
  return strict ? p.k > -p.b / 2.0 : p.k >= -p.b / 2.0;
}

AntisynchronyReport antisynchrony_attracting(const Params& p, bool strict) {
  return {strict ? p.b > 0.0 : p.b >= 0.0, p.c == 0.0};
}

std::string to_string(EquilibriumStability s) {
  switch (s) {
    case EquilibriumStability::Sink: return "sink";
    case EquilibriumStability::Source: return "source";
    case EquilibriumStability::SaddleLike: return "saddle-like";
    case EquilibriumStability::Nonhyperbolic: return "nonhyperbolic";
  }
  return "?";
}

EquilibriumStability classify_eigenvalues(const std::vector<std::complex<double>>& ev, double tol) {
  int neg = 0;
  int pos = 0;
  for (const auto& l : ev) {
    if (l.real() < -tol) ++neg;
    else if (l.real() > tol) ++pos;
  }
  if (neg + pos < static_cast<int>(ev.size())) return EquilibriumStability::Nonhyperbolic;
  if (pos == 0) return EquilibriumStability::Sink;
  if (neg == 0) return EquilibriumStability::Source;
  return EquilibriumStability::SaddleLike;
}

std::vector<Equilibrium> find_equilibria(const Params& p) {
  p.validate();
  constexpr int kGrid = 60;
  constexpr double kLo = -3.0;
  constexpr double kHi = 3.0;
  std::vector<std::array<double, 2>> roots;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      Eigen::Vector2d x{kLo + (kHi - kLo) * (i + 0.5) / kGrid, kLo + (kHi - kLo) * (j + 0.5) / kGrid};
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const auto [n1, n2] = slow_numerators(p, x[0], x[1]);
        const Eigen::Vector2d n{n1, n2};
        if (!n.allFinite() || x.cwiseAbs().maxCoeff() > 1e3) break;
        if (n.cwiseAbs().maxCoeff() < 1e-13) { ok = true; break; }
        const Eigen::Matrix2d J = slow_numerators_jacobian(p, x[0], x[1]);
        Eigen::FullPivLU<Eigen::Matrix2d> lu(J);
        if (!lu.isInvertible()) break;
        const Eigen::Vector2d step = lu.solve(n);
        x -= step;
        if (step.cwiseAbs().maxCoeff() < 1e-15 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
          const auto [m1, m2] = slow_numerators(p, x[0], x[1]);
          ok = std::max(std::abs(m1), std::abs(m2)) < 1e-10;
          break;
        }
      }
      if (!ok) continue;
      const bool dup = std::any_of(roots.begin(), roots.end(), [&](const auto& r) {
        return std::hypot(r[0] - x[0], r[1] - x[1]) < 1e-6;
      });
      if (!dup) roots.push_back({x[0], x[1]});
    }
  }
  std::sort(roots.begin(), roots.end());

  std::vector<Equilibrium> out;
  for (const auto& r : roots) {
    Equilibrium e;
    e.state = State{r[0], r[1], phi(r[0]), phi(r[1])};
    const State d = rhs(p, e.state);
    e.residual = d.vec().cwiseAbs().maxCoeff();
    Eigen::EigenSolver<Eigen::Matrix4d> es(jacobian(p, e.state), false);
    for (int i = 0; i < 4; ++i) e.eigenvalues.push_back(es.eigenvalues()[i]);
    std::sort(e.eigenvalues.begin(), e.eigenvalues.end(), [](const auto& a, const auto& b) {
      return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    e.stability = classify_eigenvalues(e.eigenvalues);
    out.push_back(e);
  }
  return out;
}

std::vector<double> synchrony_plane_equilibria(const Params& p) {
  // x - b(4x - x^3) - c = b x^3 + (1 - 4b) x - c.
  if (p.b == 0.0) return {p.c};
  return depressed_cubic_roots((1.0 - 4.0 * p.b) / p.b, -p.c / p.b);
}

SynchronyPrecision synchrony_precision(const Trajectory& traj, double t0) {
  if (traj.size() == 0 || t0 < traj.t_begin() || t0 > traj.t_end()) {
    throw Error(ErrorCode::InvalidConfig, "t0 outside the trajectory span");
  }
  SynchronyPrecision r;
  for (std::size_t i = traj.index_at_or_after(t0); i < traj.size(); ++i) {
    const State& s = traj.states[i];
    r.delta_sync = std::max({r.delta_sync, std::abs(s.x1 - s.x2), std::abs(s.y1 - s.y2)});
    r.delta_anti = std::max({r.delta_anti, std::abs(s.x1 + s.x2), std::abs(s.y1 + s.y2)});
  }
  return r;
}

}  // namespace fhn
