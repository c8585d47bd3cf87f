#include "fhn/model.hpp"

#include <type_traits>

namespace fhn {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::SingularProjection: return "SingularProjection";
    case ErrorCode::ZeroCoupling: return "ZeroCoupling";
    case ErrorCode::NotAFoldPoint: return "NotAFoldPoint";
    case ErrorCode::NoRowMatches: return "NoRowMatches";
    case ErrorCode::ReachedDoubleFold: return "ReachedDoubleFold";
    case ErrorCode::SlowEquilibriumReached: return "SlowEquilibriumReached";
    case ErrorCode::TooShort: return "TooShort";
  }
  return "Unknown";
}

void Params::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidParams, "epsilon must be a positive finite number");
  }
  if (!std::isfinite(b) || !std::isfinite(c) || !std::isfinite(k)) {
    throw Error(ErrorCode::InvalidParams, "b, c and k must be finite");
  }
  if (const auto* pert = std::get_if<PerturbedSecondCell>(&mode)) {
    if (!std::isfinite(pert->b2) || !std::isfinite(pert->c2) || !std::isfinite(pert->k2)) {
      throw Error(ErrorCode::InvalidParams, "b2, c2 and k2 must be finite");
    }
  }
}

std::string mode_name(const CouplingMode& mode) {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SymmetricBidirectional>) return "SymmetricBidirectional";
        else if constexpr (std::is_same_v<M, AsymmetricForcing>) return "AsymmetricForcing";
        else return "PerturbedSecondCell";
      },
      mode);
}

ZState to_z(const State& s) { return {s.x1 + s.x2, s.y1 + s.y2, s.x1 - s.x2, s.y1 - s.y2}; }

State from_z(const ZState& z) {
  return {0.5 * (z.z1 + z.z3), 0.5 * (z.z1 - z.z3), 0.5 * (z.z2 + z.z4), 0.5 * (z.z2 - z.z4)};
}

namespace {

// Slow-equation right-hand sides (y1', y2') for each coupling mode.
struct SlowTerms {
  const State& s;
  const Params& p;

  std::pair<double, double> operator()(const SymmetricBidirectional&) const {
    return {s.x1 - p.b * s.y1 - p.c - p.k * (s.y1 - s.y2),
            s.x2 - p.b * s.y2 - p.c - p.k * (s.y2 - s.y1)};
  }
  std::pair<double, double> operator()(const AsymmetricForcing&) const {
    return {s.x1 - p.b * s.y1 - p.c + p.k * s.y2, s.x2 - p.b * s.y2 - p.c};
  }
  std::pair<double, double> operator()(const PerturbedSecondCell& m) const {
    return {s.x1 - p.b * s.y1 - p.c - p.k * (s.y1 - s.y2),
            s.x2 - m.b2 * s.y2 - m.c2 - m.k2 * (s.y2 - s.y1)};
  }
};

// d(y1', y2') / d(y1, y2).
Eigen::Matrix2d slow_y_block(const Params& p) {
  Eigen::Matrix2d m;
  if (std::holds_alternative<SymmetricBidirectional>(p.mode)) {
    m << -p.b - p.k, p.k, p.k, -p.b - p.k;
  } else if (std::holds_alternative<AsymmetricForcing>(p.mode)) {
    m << -p.b, p.k, 0.0, -p.b;
  } else {
    const auto& pert = std::get<PerturbedSecondCell>(p.mode);
    m << -p.b - p.k, p.k, pert.k2, -pert.b2 - pert.k2;
  }
  return m;
}

}  // namespace

State rhs(const Params& p, const State& s) {
  const double inv_eps = 1.0 / p.epsilon;
  const auto [dy1, dy2] = std::visit(SlowTerms{s, p}, p.mode);
  return {inv_eps * (-s.y1 + phi(s.x1)), inv_eps * (-s.y2 + phi(s.x2)), dy1, dy2};
}

ZState rhs_z(const Params& p, const ZState& z) {
  if (!p.symmetric()) {
    throw Error(ErrorCode::InvalidParams, "rhs_z is defined for the symmetric coupling only");
  }
  const double xa = 0.5 * (z.z1 + z.z3);
  const double xb = 0.5 * (z.z1 - z.z3);
  const double inv_eps = 1.0 / p.epsilon;
  return {inv_eps * (-z.z2 + phi(xa) + phi(xb)),
          z.z1 - p.b * z.z2 - 2.0 * p.c,
          inv_eps * (-z.z4 + phi(xa) - phi(xb)),
          z.z3 - p.b * z.z4 - 2.0 * p.k * z.z4};
}

Eigen::Matrix4d jacobian(const Params& p, const State& s) {
  const double inv_eps = 1.0 / p.epsilon;
  Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
  j(0, 0) = inv_eps * phi_prime(s.x1);
  j(0, 2) = -inv_eps;
  j(1, 1) = inv_eps * phi_prime(s.x2);
  j(1, 3) = -inv_eps;
  j(2, 0) = 1.0;
  j(3, 1) = 1.0;
  j.block<2, 2>(2, 2) = slow_y_block(p);
  return j;
}

}  // namespace fhn
