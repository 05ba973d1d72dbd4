#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "indefbif/core.hpp"
#include "indefbif/dopri.hpp"

namespace indefbif {

enum class Crossing { any, up, down };

/// Scalar zero-crossing or time-target event along a planar trajectory.
struct EventSpec {
  enum class Kind { zero_crossing, time_target };

  Kind kind = Kind::zero_crossing;
  std::function<double(double, const PhasePoint&)> function;
  double time = 0.0;
  Crossing direction = Crossing::any;
  int count = 1;
  bool terminal = true;

  static EventSpec crossing(std::function<double(double, const PhasePoint&)> fn,
                            Crossing dir = Crossing::any, int count = 1, bool terminal = true);
  static EventSpec at_time(double t, bool terminal = false);
};

struct TrajectorySample {
  double t = 0.0;
  PhasePoint pt;
};

struct EventHit {
  double t = 0.0;
  PhasePoint pt;
  std::size_t index = 0;
};

enum class TrajectoryStatus {
  completed,             // reached the end of the span
  event_stop,            // halted by a terminal event
  left_positive_region,  // u crossed zero
  step_limit,
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<EventHit> events;
  std::vector<DenseStep<2>> steps;
  TrajectoryStatus status = TrajectoryStatus::completed;

  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }

  /// Dense-output evaluation anywhere inside the integrated span.
  PhasePoint at(double t) const;

  std::optional<EventHit> event(std::size_t index) const;
  /// Like event() but throws NotReachableError when the event never fired.
  EventHit require_event(std::size_t index) const;

  bool left_positive_region() const { return status == TrajectoryStatus::left_positive_region; }

  double min_u() const;
};

enum class Side { left, right };

/// Planar integrations of u'' = -lambda u - w u^p with a fixed weight w;
/// u(t) < 0 terminates the run.
Trajectory integrate_weighted(const PhasePoint& start, double weight, double lambda, double p,
                              double t0, double t1, const std::vector<EventSpec>& events,
                              const OdeSettings& settings, bool record_steps = true);

/// Central flow u' = v, v' = -lambda u - b u^p over t in [0, t_span].
Trajectory integrate_central(const PhasePoint& start, double b, double lambda, double p,
                             double t_span, const std::vector<EventSpec>& events,
                             const OdeSettings& settings);

/// Outer problem: left runs forward from (M, slope0) at t = 0 to alpha under
/// weight -c; right runs backward from (M, slope0) at t = 1 to 1 - alpha
/// under weight -nu c.
Trajectory integrate_outer(Side side, double slope0, const ProblemParams& params,
                           const OdeSettings& settings);

/// The full piecewise problem from (M, slope0) at t = 0 to t = 1; the
/// weight discontinuities are integration segment boundaries.
Trajectory integrate_full(double slope0, const ProblemParams& params, const OdeSettings& settings,
                          bool record_steps = true);

}  // namespace indefbif
