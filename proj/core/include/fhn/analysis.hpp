#pragma once

// Post-processing of trajectories: peak/trough segmentation, mixed-mode
// signatures, canard segments and periodic relaxation orbits.

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fhn/geometry.hpp"
#include "fhn/integrator.hpp"
#include "fhn/model.hpp"

namespace fhn {

enum class Variable { X1, X2 };
enum class OscillationKind { Large, Small };

std::string to_string(Variable v);
std::string to_string(OscillationKind k);
Variable variable_from_string(const std::string& s);

/// Fold-to-fold span 4/sqrt3.
inline constexpr double kLargeThreshold = 2.0 * kFold;

struct OscillationEvent {
  double t_peak = 0.0;
  Variable variable = Variable::X1;
  double amplitude = 0.0;  // peak minus preceding trough
  OscillationKind kind = OscillationKind::Small;
};

struct SegmentOptions {
  double large_threshold = kLargeThreshold;
  /// Peak/trough pairs closer than this are dropped as jitter.
  double min_amplitude = 1e-3;
};

/// One event per local maximum that has a preceding minimum. Extrema are
/// located on the cubic dense output. Throws TooShort with fewer than three
/// sign changes of the derivative.
std::vector<OscillationEvent> segment_oscillations(const Trajectory& traj, Variable v,
                                                   const SegmentOptions& opt = {});

void write_oscillations_csv(std::ostream& os, const std::vector<OscillationEvent>& events);

struct MmoBlock {
  int large = 0;
  int small = 0;
  friend bool operator==(const MmoBlock&, const MmoBlock&) = default;
};

struct MmoSignature {
  std::vector<MmoBlock> blocks;
  double t_from = 0.0;
  double t_to = 0.0;
  /// Blocks strictly inside the window (first and last may be cut off) are all equal.
  bool stationary = false;
  /// Smallest p such that the interior blocks repeat with period p; 0 if none
  /// with at least two full repetitions.
  int period = 0;
  bool has_large() const;
  bool has_small() const;
  std::string str() const;  // e.g. "1^3 1^3 1^3"
};

/// Groups Large/Small events with t_peak in [t_from, t_to] into blocks of a
/// run of Large followed by a run of Small. Throws TooShort if there are no events.
MmoSignature mmo_signature(const Trajectory& traj, Variable v,
                           double t_from = -std::numeric_limits<double>::infinity(),
                           double t_to = std::numeric_limits<double>::infinity(),
                           const SegmentOptions& opt = {});

MmoSignature mmo_signature(const std::vector<OscillationEvent>& events, double t_from, double t_to);

struct CanardSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double max_residual = 0.0;
  std::vector<RegionLabel> region_path;  // distinct consecutive regions visited
};

struct CanardReport {
  std::vector<CanardSegment> segments;  // those with dwell > dwell_min
  bool verdict = false;
  double dwell = 0.0;  // longest non-attracting dwell seen
};

inline constexpr double kDefaultDwellMin = 1.0;
inline constexpr double kDefaultProxFactor = 5.0;

/// A segment starts at a sample in A within prox_factor * eps of C0 and
/// continues while samples stay that close to C0 outside A.
CanardReport detect_canard(const Trajectory& traj, const Params& p,
                           double dwell_min = kDefaultDwellMin,
                           double prox_factor = kDefaultProxFactor,
                           double t_from = -std::numeric_limits<double>::infinity(),
                           double t_to = std::numeric_limits<double>::infinity());

struct RelaxationOptions {
  double transient_fraction = 0.1;
  double transient_min = 50.0;
  double recurrence_tol = 1e-4;
  double sync_tol = 1e-3;
};

struct RelaxationReport {
  double period = 0.0;
  double amplitude = 0.0;  // max x1 - min x1 over one period
  bool synchronous = false;
  double delta_sync = 0.0;  // over the periodic window
  double delta_anti = 0.0;
  double t_start = 0.0;  // periodic window
  double t_end = 0.0;
};

/// Recurrence of rising crossings of x1 = 0 after the transient. Empty when
/// no two crossings recur within recurrence_tol.
std::optional<RelaxationReport> detect_relaxation_oscillation(const Trajectory& traj,
                                                              const RelaxationOptions& opt = {});

}  // namespace fhn
