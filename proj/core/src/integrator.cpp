#include "fhn/integrator.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "fhn/detail/ode.hpp"

namespace fhn {

namespace {

using V4 = detail::Vec<4>;

State to_state(const V4& v) { return {v[0], v[1], v[2], v[3]}; }

}  // namespace

EventSpec EventSpec::fold_crossing(int cell, int sign, Crossing direction) {
  if (cell != 1 && cell != 2) throw Error(ErrorCode::InvalidConfig, "fold cell must be 1 or 2");
  if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidConfig, "fold sign must be +1 or -1");
  EventSpec e;
  e.id = std::string("fold_x") + std::to_string(cell) + (sign > 0 ? "_pos" : "_neg");
  e.normal[cell - 1] = 1.0;
  e.level = sign * kFold;
  e.direction = direction;
  return e;
}

EventSpec EventSpec::plane(std::string id, std::array<double, 4> normal, double level,
                           Crossing direction) {
  EventSpec e;
  e.id = std::move(id);
  e.normal = normal;
  e.level = level;
  e.direction = direction;
  return e;
}

double EventSpec::value(const State& s) const {
  return normal[0] * s.x1 + normal[1] * s.x2 + normal[2] * s.y1 + normal[3] * s.y2 - level;
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "rtol and atol must be positive");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::InvalidConfig, "t_end must be positive and finite");
  }
  if (max_steps <= 0) throw Error(ErrorCode::InvalidConfig, "max_steps must be positive");
  if (initial_step < 0.0) throw Error(ErrorCode::InvalidConfig, "initial_step must be >= 0");
  if (!(max_step > 0.0)) throw Error(ErrorCode::InvalidConfig, "max_step must be positive");
}

State Trajectory::at(double t) const {
  if (times.empty() || t < times.front() || t > times.back()) {
    throw Error(ErrorCode::InvalidConfig, "dense output requested outside the trajectory span");
  }
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t i1 = it == times.end() ? times.size() - 1 : static_cast<std::size_t>(it - times.begin());
  if (i1 == 0) i1 = 1;
  const std::size_t i0 = i1 - 1;
  if (derivatives.size() != times.size()) {
    const double s = (t - times[i0]) / (times[i1] - times[i0]);
    return State::from((1.0 - s) * states[i0].vec() + s * states[i1].vec());
  }
  return State::from(detail::hermite<4>(times[i0], states[i0].vec(), derivatives[i0].vec(),
                                        times[i1], states[i1].vec(), derivatives[i1].vec(), t));
}

std::size_t Trajectory::index_at_or_after(double t) const {
  return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
}

Trajectory integrate(const Params& p, const State& s0, const IntegratorConfig& cfg) {
  p.validate();
  cfg.validate();
  if (!s0.finite()) throw Error(ErrorCode::NonFiniteState, "initial state is not finite");

  detail::DriveOptions<4> opt;
  opt.rtol = cfg.rtol;
  opt.atol = cfg.atol;
  opt.t_end = cfg.t_end;
  opt.max_steps = cfg.max_steps;
  opt.initial_step = cfg.initial_step;
  opt.max_step = cfg.max_step;

  std::vector<detail::ScalarEvent<4>> events;
  events.reserve(cfg.events.size());
  for (std::size_t i = 0; i < cfg.events.size(); ++i) {
    const EventSpec spec = cfg.events[i];
    detail::ScalarEvent<4> ev;
    ev.id = static_cast<int>(i);
    ev.g = [spec](const V4& v) { return spec.value(to_state(v)); };
    ev.direction = spec.direction == Crossing::Rising ? 1 : spec.direction == Crossing::Falling ? -1 : 0;
    ev.terminal = spec.terminal;
    events.push_back(std::move(ev));
  }

  auto f = [&p](const V4& v) -> V4 { return rhs(p, to_state(v)).vec(); };
  detail::DriveResult<4> res;
  if (cfg.method == Method::Rosenbrock) {
    const detail::RosenbrockStepper<4> stepper(f, [&p](const V4& v) { return jacobian(p, to_state(v)); });
    res = detail::drive<4>(stepper, s0.vec(), opt, events);
  } else {
    const detail::DormandPrinceStepper<4> stepper(f);
    res = detail::drive<4>(stepper, s0.vec(), opt, events);
  }

  Trajectory traj;
  traj.times = std::move(res.t);
  traj.states.reserve(res.y.size());
  traj.derivatives.reserve(res.f.size());
  for (const auto& v : res.y) traj.states.push_back(to_state(v));
  for (const auto& v : res.f) traj.derivatives.push_back(to_state(v));
  for (const auto& hit : res.events) {
    traj.events.push_back({hit.t, cfg.events[static_cast<std::size_t>(hit.id)].id, to_state(hit.y)});
  }
  traj.accepted_steps = res.accepted;
  traj.rejected_steps = res.rejected;
  return traj;
}

std::pair<Trajectory, Trajectory> integrate_two(const Params& p, const State& s0a,
                                                const State& s0b, const IntegratorConfig& cfg) {
  return {integrate(p, s0a, cfg), integrate(p, s0b, cfg)};
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x1,x2,y1,y2\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State& s = traj.states[i];
    os << format_real(traj.times[i]) << ',' << format_real(s.x1) << ',' << format_real(s.x2) << ','
       << format_real(s.y1) << ',' << format_real(s.y2) << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,x1,x2,y1,y2") {
    throw Error(ErrorCode::InvalidConfig, "trajectory CSV must start with header t,x1,x2,y1,y2");
  }
  Trajectory traj;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0.0;
    State s;
    if (!(row >> t >> s.x1 >> s.x2 >> s.y1 >> s.y2)) {
      throw Error(ErrorCode::InvalidConfig, "malformed trajectory row: " + line);
    }
    if (!traj.times.empty() && !(t > traj.times.back())) {
      throw Error(ErrorCode::InvalidConfig, "trajectory times must be strictly increasing");
    }
    traj.times.push_back(t);
    traj.states.push_back(s);
  }
  if (traj.size() < 2) throw Error(ErrorCode::InvalidConfig, "trajectory needs at least two rows");
  return traj;
}

}  // namespace fhn
