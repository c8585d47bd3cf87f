#pragma once

// Fixed-dimension adaptive ODE machinery shared by the full-system integrator
// and the reduced (slow-flow) integrator. Autonomous systems only.

#include <Eigen/Core>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fhn/error.hpp"

namespace fhn::detail {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
template <int N>
using Mat = Eigen::Matrix<double, N, N>;

/// Cubic Hermite interpolation between two accepted steps.
template <int N>
Vec<N> hermite(double t0, const Vec<N>& y0, const Vec<N>& f0, double t1, const Vec<N>& y1,
               const Vec<N>& f1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
}

// Linearly implicit Rosenbrock method of order 4 with an embedded order-3
// estimate (Hairer-Wanner RODAS coefficients, stiffly accurate, L-stable).
template <int N>
class RosenbrockStepper {
 public:
  using Rhs = std::function<Vec<N>(const Vec<N>&)>;
  using Jac = std::function<Mat<N>(const Vec<N>&)>;
  static constexpr int kErrorOrder = 3;

  RosenbrockStepper(Rhs f, Jac jac) : f_(std::move(f)), jac_(std::move(jac)) {}

  const Rhs& rhs() const { return f_; }

  /// One step of size h from y (with f(y) = fy). Writes the new state and the
  /// embedded error estimate.
  void step(const Vec<N>& y, const Vec<N>& fy, double h, Vec<N>& y_new, Vec<N>& err) const {
    constexpr double gamma = 0.25;
    constexpr double a21 = 1.544;
    constexpr double a31 = 0.9466785280815826, a32 = 0.2557011698983284;
    constexpr double a41 = 3.314825187068521, a42 = 2.896124015972201, a43 = 0.9986419139977817;
    constexpr double a51 = 1.221224509226641, a52 = 6.019134481288629, a53 = 12.53708332932087,
                     a54 = -0.6878860361058950;
    constexpr double c21 = -5.6688;
    constexpr double c31 = -2.430093356833875, c32 = -0.2063599157091915;
    constexpr double c41 = -0.1073529058151375, c42 = -9.594562251023355,
                     c43 = -20.47028614809616;
    constexpr double c51 = 7.496443313967647, c52 = -10.24680431464352, c53 = -33.99990352819905,
                     c54 = 11.70890893206160;
    constexpr double c61 = 8.083246795921522, c62 = -7.981132988064893, c63 = -31.52159432874371,
                     c64 = 16.31930543123136, c65 = -6.058818238834054;

    Mat<N> a = -jac_(y);
    a.diagonal().array() += 1.0 / (gamma * h);
    const Eigen::PartialPivLU<Mat<N>> lu(a);
    const double inv_h = 1.0 / h;

    const Vec<N> g1 = lu.solve(fy);
    const Vec<N> g2 = lu.solve(f_(y + a21 * g1) + (c21 * inv_h) * g1);
    const Vec<N> g3 = lu.solve(f_(y + a31 * g1 + a32 * g2) + inv_h * (c31 * g1 + c32 * g2));
    const Vec<N> g4 = lu.solve(f_(y + a41 * g1 + a42 * g2 + a43 * g3) +
                               inv_h * (c41 * g1 + c42 * g2 + c43 * g3));
    const Vec<N> y5 = y + a51 * g1 + a52 * g2 + a53 * g3 + a54 * g4;
    const Vec<N> g5 = lu.solve(f_(y5) + inv_h * (c51 * g1 + c52 * g2 + c53 * g3 + c54 * g4));
    const Vec<N> y6 = y5 + g5;
    err = lu.solve(f_(y6) + inv_h * (c61 * g1 + c62 * g2 + c63 * g3 + c64 * g4 + c65 * g5));
    y_new = y6 + err;
  }

 private:
  Rhs f_;
  Jac jac_;
};

// Explicit Dormand-Prince 5(4).
template <int N>
class DormandPrinceStepper {
 public:
  using Rhs = std::function<Vec<N>(const Vec<N>&)>;
  static constexpr int kErrorOrder = 4;

  explicit DormandPrinceStepper(Rhs f) : f_(std::move(f)) {}

  const Rhs& rhs() const { return f_; }

  void step(const Vec<N>& y, const Vec<N>& fy, double h, Vec<N>& y_new, Vec<N>& err) const {
    const Vec<N>& k1 = fy;
    const Vec<N> k2 = f_(y + h * (1.0 / 5.0) * k1);
    const Vec<N> k3 = f_(y + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2));
    const Vec<N> k4 = f_(y + h * ((44.0 / 45.0) * k1 - (56.0 / 15.0) * k2 + (32.0 / 9.0) * k3));
    const Vec<N> k5 = f_(y + h * ((19372.0 / 6561.0) * k1 - (25360.0 / 2187.0) * k2 +
                                  (64448.0 / 6561.0) * k3 - (212.0 / 729.0) * k4));
    const Vec<N> k6 =
        f_(y + h * ((9017.0 / 3168.0) * k1 - (355.0 / 33.0) * k2 + (46732.0 / 5247.0) * k3 +
                    (49.0 / 176.0) * k4 - (5103.0 / 18656.0) * k5));
    y_new = y + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 -
                     (2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
    const Vec<N> k7 = f_(y_new);
    err = h * ((71.0 / 57600.0) * k1 - (71.0 / 16695.0) * k3 + (71.0 / 1920.0) * k4 -
               (17253.0 / 339200.0) * k5 + (22.0 / 525.0) * k6 - (1.0 / 40.0) * k7);
  }

 private:
  Rhs f_;
};

template <int N>
struct ScalarEvent {
  int id = 0;
  std::function<double(const Vec<N>&)> g;
  int direction = 0;  // +1 rising only, -1 falling only, 0 both
  bool terminal = false;
};

template <int N>
struct EventHit {
  double t = 0.0;
  int id = 0;
  Vec<N> y;
};

template <int N>
struct DriveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_end = 1.0;
  long max_steps = 10'000'000;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  double event_time_tol = 1e-13;
};

template <int N>
struct DriveResult {
  std::vector<double> t;
  std::vector<Vec<N>> y;
  std::vector<Vec<N>> f;
  std::vector<EventHit<N>> events;
  long accepted = 0;
  long rejected = 0;
  bool stopped_by_event = false;
};

/// Locates the root of an event function on the Hermite interpolant of one
/// step by bisection, to `tol` in time.
template <int N>
double locate_event(const ScalarEvent<N>& ev, double t0, const Vec<N>& y0, const Vec<N>& f0,
                    double g0, double t1, const Vec<N>& y1, const Vec<N>& f1, double tol) {
  double lo = t0;
  double hi = t1;
  double g_lo = g0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = ev.g(hermite<N>(t0, y0, f0, t1, y1, f1, mid));
    if (g_mid == 0.0) return mid;
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

/// Adaptive driver: max-norm error control with per-component scale
/// atol + rtol * max(|y_old|, |y_new|), every accepted step recorded.
template <int N, class Stepper>
DriveResult<N> drive(const Stepper& stepper, const Vec<N>& y0, const DriveOptions<N>& opt,
                     const std::vector<ScalarEvent<N>>& events = {}) {
  DriveResult<N> out;
  const auto& f = stepper.rhs();
  double t = 0.0;
  Vec<N> y = y0;
  Vec<N> fy = f(y);
  if (!y.allFinite() || !fy.allFinite()) {
    throw Error(ErrorCode::NonFiniteState, "initial state or its derivative is not finite");
  }
  out.t.push_back(t);
  out.y.push_back(y);
  out.f.push_back(fy);

  std::vector<double> g_prev(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) g_prev[i] = events[i].g(y);

  const auto scale = [&](const Vec<N>& a, const Vec<N>& b) {
    return (opt.atol + opt.rtol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix();
  };

  double h = opt.initial_step;
  if (!(h > 0.0)) {
    // Hairer-Wanner starting step heuristic.
    const double d0 = (y.array() / scale(y, y).array()).abs().maxCoeff();
    const double d1 = (fy.array() / scale(y, y).array()).abs().maxCoeff();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, opt.t_end);
  }
  h = std::min(h, opt.max_step);

  const double expo = 1.0 / (Stepper::kErrorOrder + 1);
  Vec<N> y_new;
  Vec<N> err;
  bool last_nonfinite = false;

  while (t < opt.t_end) {
    if (out.accepted + out.rejected >= opt.max_steps) {
      throw Error(ErrorCode::MaxStepsExceeded, "step budget exhausted at t=" + std::to_string(t));
    }
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_min) {
      if (last_nonfinite) {
        throw Error(ErrorCode::NonFiniteState, "non-finite state near t=" + std::to_string(t));
      }
      throw Error(ErrorCode::StepSizeUnderflow, "step size underflow at t=" + std::to_string(t));
    }
    bool final_step = false;
    if (t + h >= opt.t_end || opt.t_end - (t + h) < h_min) {
      h = opt.t_end - t;
      final_step = true;
    }
    stepper.step(y, fy, h, y_new, err);
    double err_norm = std::numeric_limits<double>::infinity();
    if (y_new.allFinite() && err.allFinite()) {
      err_norm = (err.array() / scale(y, y_new).array()).abs().maxCoeff();
      last_nonfinite = false;
    } else {
      last_nonfinite = true;
    }
    if (!(err_norm <= 1.0)) {
      ++out.rejected;
      const double fac = std::isfinite(err_norm) ? std::max(0.2, 0.9 * std::pow(err_norm, -expo)) : 0.25;
      h *= fac;
      continue;
    }
    const Vec<N> f_new = f(y_new);
    if (!f_new.allFinite()) {
      ++out.rejected;
      last_nonfinite = true;
      h *= 0.25;
      continue;
    }
    ++out.accepted;
    const double t_new = final_step ? opt.t_end : t + h;

    // Event detection over [t, t_new].
    std::vector<EventHit<N>> hits;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double g1 = events[i].g(y_new);
      const double g0 = g_prev[i];
      const bool crossed = (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
      if (crossed) {
        const int dir = g1 > g0 ? +1 : -1;
        if (events[i].direction == 0 || events[i].direction == dir) {
          const double te =
              locate_event<N>(events[i], t, y, fy, g0, t_new, y_new, f_new, opt.event_time_tol);
          hits.push_back({te, events[i].id, hermite<N>(t, y, fy, t_new, y_new, f_new, te)});
        }
      }
      g_prev[i] = g1;
    }
    std::sort(hits.begin(), hits.end(), [](const EventHit<N>& a, const EventHit<N>& b) {
      return a.t < b.t || (a.t == b.t && a.id < b.id);
    });

    bool stop = false;
    for (const auto& hit : hits) {
      out.events.push_back(hit);
      const auto it = std::find_if(events.begin(), events.end(),
                                   [&](const ScalarEvent<N>& e) { return e.id == hit.id; });
      if (it != events.end() && it->terminal) {
        stop = true;
        if (hit.t > t) {
          out.t.push_back(hit.t);
          out.y.push_back(hit.y);
          out.f.push_back(f(hit.y));
        }
        break;
      }
    }
    if (stop) {
      out.stopped_by_event = true;
      return out;
    }

    t = t_new;
    y = y_new;
    fy = f_new;
    out.t.push_back(t);
    out.y.push_back(y);
    out.f.push_back(fy);

    const double fac = err_norm > 0.0 ? std::clamp(0.9 * std::pow(err_norm, -expo), 0.2, 5.0) : 5.0;
    h = std::min(h * fac, opt.max_step);
  }
  return out;
}

}  // namespace fhn::detail
