#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fhn/model.hpp"

namespace fhn {

enum class Method {
  Rosenbrock,     // linearly implicit, L-stable; the default
  DormandPrince,  // explicit 5(4); cross-check only
};

enum class Crossing { Any, Rising, Falling };

/// Zero crossing of the linear functional normal . (x1, x2, y1, y2) - level.
struct EventSpec {
  std::string id;
  std::array<double, 4> normal{};
  double level = 0.0;
  Crossing direction = Crossing::Any;
  bool terminal = false;

  /// Crossing of the fold line x_i = sign * 2/sqrt(3); `cell` is 1 or 2.
  static EventSpec fold_crossing(int cell, int sign, Crossing direction = Crossing::Any);
  /// Crossing of the hyperplane normal . s = level.
  static EventSpec plane(std::string id, std::array<double, 4> normal, double level,
                         Crossing direction = Crossing::Any);

  double value(const State& s) const;
};

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_end = 100.0;
  long max_steps = 20'000'000;
  double initial_step = 0.0;  // 0 = automatic
  double max_step = std::numeric_limits<double>::infinity();
  Method method = Method::Rosenbrock;
  std::vector<EventSpec> events;

  /// Throws InvalidConfig on non-positive tolerances, horizon or budget.
  void validate() const;
};

struct EventRecord {
  double t = 0.0;
  std::string id;
  State state;
};

/// Accepted steps of one integration, with enough derivative information
/// for C^1 cubic dense output between them.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<State> derivatives;
  std::vector<EventRecord> events;
  long accepted_steps = 0;
  long rejected_steps = 0;

  std::size_t size() const { return times.size(); }
  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }

  /// Dense output at t in [t_begin, t_end]; throws InvalidConfig outside.
  State at(double t) const;

  /// Index of the first sample with time >= t (size() if none).
  std::size_t index_at_or_after(double t) const;
};

Trajectory integrate(const Params& p, const State& s0, const IntegratorConfig& cfg);

/// Two independent integrations with the same parameters and configuration.
std::pair<Trajectory, Trajectory> integrate_two(const Params& p, const State& s0a,
                                                const State& s0b, const IntegratorConfig& cfg);

/// CSV with header "t,x1,x2,y1,y2", one row per accepted step, 17 significant
/// digits, '\n' line endings.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);

/// Formats a double with 17 significant digits.
std::string format_real(double v);

}  // namespace fhn
