#include "fhn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "fhn/stability.hpp"

namespace fhn {

std::string to_string(Variable v) { return v == Variable::X1 ? "x1" : "x2"; }

std::string to_string(OscillationKind k) { return k == OscillationKind::Large ? "Large" : "Small"; }

Variable variable_from_string(const std::string& s) {
  if (s == "x1") return Variable::X1;
  if (s == "x2") return Variable::X2;
  throw Error(ErrorCode::InvalidConfig, "unknown variable '" + s + "'");
}

namespace {

double component(const State& s, Variable v) { return v == Variable::X1 ? s.x1 : s.x2; }

struct Extremum {
  double t;
  double value;
  bool is_max;
};

// Derivative of the cubic Hermite interpolant of one component.
double hermite_slope(double t0, double y0, double f0, double t1, double y1, double f1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  return (6.0 * s * s - 6.0 * s) * (y0 - y1) / h + (3.0 * s * s - 4.0 * s + 1.0) * f0 +
         (3.0 * s * s - 2.0 * s) * f1;
}

double hermite_value(double t0, double y0, double f0, double t1, double y1, double f1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * f1;
}

std::vector<Extremum> raw_extrema(const Trajectory& traj, Variable v) {
  std::vector<Extremum> out;
  const std::size_t n = traj.size();
  if (n < 3) return out;
  const bool dense = traj.derivatives.size() == n;
  std::vector<double> slope(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (dense) {
      slope[i] = component(traj.derivatives[i], v);
    } else {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 < n ? i + 1 : i;
      slope[i] = (component(traj.states[b], v) - component(traj.states[a], v)) /
                 (traj.times[b] - traj.times[a]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d0 = slope[i];
    const double d1 = slope[i + 1];
    if (!((d0 > 0.0 && d1 <= 0.0) || (d0 < 0.0 && d1 >= 0.0))) continue;
    if (d1 == 0.0 && i + 2 < n && (slope[i + 2] > 0.0) == (d0 > 0.0)) continue;  // plateau
    const bool is_max = d0 > 0.0;
    const double t0 = traj.times[i];
    const double t1 = traj.times[i + 1];
    const double y0 = component(traj.states[i], v);
    const double y1 = component(traj.states[i + 1], v);
    if (!dense) {
      out.push_back({t0, y0, is_max});
      continue;
    }
    double lo = t0;
    double hi = t1;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double dm = hermite_slope(t0, y0, d0, t1, y1, d1, mid);
      if ((dm > 0.0) == (d0 > 0.0) && dm != 0.0) lo = mid; else hi = mid;
    }
    const double te = 0.5 * (lo + hi);
    out.push_back({te, hermite_value(t0, y0, d0, t1, y1, d1, te), is_max});
  }
  return out;
}

// Hysteresis: a reversal smaller than min_amplitude is jitter.
std::vector<Extremum> filter_extrema(const std::vector<Extremum>& cand, double min_amplitude) {
  std::vector<Extremum> out;
  if (cand.empty()) return out;
  Extremum run = cand.front();
  for (std::size_t i = 1; i < cand.size(); ++i) {
    const Extremum& e = cand[i];
    if (e.is_max == run.is_max) {
      if (e.is_max ? e.value > run.value : e.value < run.value) run = e;
    } else if (std::abs(e.value - run.value) >= min_amplitude) {
      out.push_back(run);
      run = e;
    }
  }
  out.push_back(run);
  return out;
}

}  // namespace

std::vector<OscillationEvent> segment_oscillations(const Trajectory& traj, Variable v,
                                                   const SegmentOptions& opt) {
  const auto cand = raw_extrema(traj, v);
  if (cand.size() < 3) {
    throw Error(ErrorCode::TooShort, "fewer than three turning points in " + to_string(v));
  }
  const auto ext = filter_extrema(cand, opt.min_amplitude);
  std::vector<OscillationEvent> events;
  for (std::size_t i = 1; i < ext.size(); ++i) {
    if (!ext[i].is_max || ext[i - 1].is_max) continue;
    OscillationEvent e;
    e.t_peak = ext[i].t;
    e.variable = v;
    e.amplitude = std::max(0.0, ext[i].value - ext[i - 1].value);
    e.kind = e.amplitude >= opt.large_threshold ? OscillationKind::Large : OscillationKind::Small;
    events.push_back(e);
  }
  return events;
}

void write_oscillations_csv(std::ostream& os, const std::vector<OscillationEvent>& events) {
  os << "t_peak,variable,amplitude,kind\n";
  for (const auto& e : events) {
    os << format_real(e.t_peak) << ',' << to_string(e.variable) << ',' << format_real(e.amplitude)
       << ',' << to_string(e.kind) << '\n';
  }
}

bool MmoSignature::has_large() const {
  return std::any_of(blocks.begin(), blocks.end(), [](const MmoBlock& b) { return b.large > 0; });
}

bool MmoSignature::has_small() const {
  return std::any_of(blocks.begin(), blocks.end(), [](const MmoBlock& b) { return b.small > 0; });
}

std::string MmoSignature::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) os << ' ';
    os << blocks[i].large << '^' << blocks[i].small;
  }
  return os.str();
}

MmoSignature mmo_signature(const std::vector<OscillationEvent>& events, double t_from, double t_to) {
  MmoSignature sig;
  sig.t_from = t_from;
  sig.t_to = t_to;
  MmoBlock cur;
  bool open = false;
  for (const auto& e : events) {
    if (e.t_peak < t_from || e.t_peak > t_to) continue;
    if (e.kind == OscillationKind::Large) {
      if (open && cur.small > 0) {
        sig.blocks.push_back(cur);
        cur = {};
      }
      ++cur.large;
    } else {
      ++cur.small;
    }
    open = true;
  }
  if (!open) throw Error(ErrorCode::TooShort, "no oscillations in the window");
  sig.blocks.push_back(cur);

  if (sig.blocks.size() >= 3) {
    const std::vector<MmoBlock> inner(sig.blocks.begin() + 1, sig.blocks.end() - 1);
    sig.stationary = std::all_of(inner.begin(), inner.end(),
                                 [&](const MmoBlock& b) { return b == inner.front(); });
    for (std::size_t per = 1; 2 * per <= inner.size() && sig.period == 0; ++per) {
      bool ok = true;
      for (std::size_t i = per; i < inner.size() && ok; ++i) ok = inner[i] == inner[i - per];
      if (ok) sig.period = static_cast<int>(per);
    }
  } else {
    sig.stationary = sig.blocks.size() == 1 ||
                     (sig.blocks.size() == 2 && sig.blocks[0] == sig.blocks[1]);
  }
  return sig;
}

MmoSignature mmo_signature(const Trajectory& traj, Variable v, double t_from, double t_to,
                           const SegmentOptions& opt) {
  const auto events = segment_oscillations(traj, v, opt);
  const double lo = std::max(t_from, traj.size() ? traj.t_begin() : t_from);
  const double hi = std::min(t_to, traj.size() ? traj.t_end() : t_to);
  return mmo_signature(events, lo, hi);
}

CanardReport detect_canard(const Trajectory& traj, const Params& p, double dwell_min,
                           double prox_factor, double t_from, double t_to) {
  CanardReport rep;
  const double tol = prox_factor * p.epsilon;
  const auto residual = slow_manifold_residual(traj);

  bool armed = false;  // previous sample was close to an attracting sheet
  bool open = false;
  CanardSegment cur;
  auto close = [&]() {
    if (!open) return;
    const double dwell = cur.t_end - cur.t_start;
    rep.dwell = std::max(rep.dwell, dwell);
    if (dwell > dwell_min) rep.segments.push_back(cur);
    open = false;
  };

  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (t < t_from || t > t_to) {
      close();
      armed = false;
      continue;
    }
    const State& s = traj.states[i];
    const RegionLabel region = classify_region(s.x1, s.x2);
    const bool near = residual[i] <= tol;
    if (is_attracting(region)) {
      close();
      armed = near;
      continue;
    }
    if (!near) {
      close();
      armed = false;
      continue;
    }
    if (open) {
      cur.t_end = t;
      cur.max_residual = std::max(cur.max_residual, residual[i]);
      if (cur.region_path.back() != region) cur.region_path.push_back(region);
    } else if (armed) {
      // The segment starts where the trajectory leaves A.
      cur = CanardSegment{traj.times[i - 1], t, std::max(residual[i - 1], residual[i]), {region}};
      open = true;
    }
  }
  close();
  rep.verdict = !rep.segments.empty();
  return rep;
}

std::optional<RelaxationReport> detect_relaxation_oscillation(const Trajectory& traj,
                                                              const RelaxationOptions& opt) {
  if (traj.size() < 3) return std::nullopt;
  const double span = traj.t_end() - traj.t_begin();
  const double t_cut = traj.t_begin() + std::max(opt.transient_fraction * span, opt.transient_min);
  if (t_cut >= traj.t_end()) return std::nullopt;

  struct Crossing {
    double t;
    State s;
  };
  std::vector<Crossing> crossings;
  for (std::size_t i = traj.index_at_or_after(t_cut); i + 1 < traj.size(); ++i) {
    const double a = traj.states[i].x1;
    const double b = traj.states[i + 1].x1;
    if (!(a < 0.0 && b >= 0.0)) continue;
    double lo = traj.times[i];
    double hi = traj.times[i + 1];
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (traj.at(mid).x1 < 0.0) lo = mid; else hi = mid;
    }
    const double tc = 0.5 * (lo + hi);
    crossings.push_back({tc, traj.at(tc)});
  }
  if (crossings.size() < 2) return std::nullopt;

  const Crossing& last = crossings.back();
  for (std::size_t j = crossings.size() - 1; j-- > 0;) {
    const double dist = (crossings[j].s.vec() - last.s.vec()).cwiseAbs().maxCoeff();
    if (dist > opt.recurrence_tol) continue;
    RelaxationReport r;
    r.t_start = crossings[j].t;
    r.t_end = last.t;
    r.period = r.t_end - r.t_start;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = traj.index_at_or_after(r.t_start); i < traj.size() && traj.times[i] <= r.t_end; ++i) {
      lo = std::min(lo, traj.states[i].x1);
      hi = std::max(hi, traj.states[i].x1);
    }
    r.amplitude = hi - lo;
    const SynchronyPrecision sp = synchrony_precision(traj, r.t_start);
    r.delta_sync = sp.delta_sync;
    r.delta_anti = sp.delta_anti;
    r.synchronous = r.delta_sync <= opt.sync_tol;
    return r;
  }
  return std::nullopt;
}

}  // namespace fhn
