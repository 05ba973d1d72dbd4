#include "indefbif/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "indefbif/error.hpp"

namespace indefbif {

EventSpec EventSpec::crossing(std::function<double(double, const PhasePoint&)> fn, Crossing dir,
                              int count, bool terminal) {
  if (count < 1) throw DomainError("event count must be >= 1");
  EventSpec e;
  e.kind = Kind::zero_crossing;
  e.function = std::move(fn);
  e.direction = dir;
  e.count = count;
  e.terminal = terminal;
  return e;
}

EventSpec EventSpec::at_time(double t, bool terminal) {
  EventSpec e;
  e.kind = Kind::time_target;
  e.time = t;
  e.terminal = terminal;
  return e;
}

PhasePoint Trajectory::at(double t) const {
  if (steps.empty()) {
    if (!samples.empty() && t == samples.front().t) return samples.front().pt;
    throw DomainError("trajectory has no dense output");
  }
  const bool forward = steps.front().h > 0.0;
  auto inside = [&](const DenseStep<2>& s) {
    const double a = std::min(s.t0, s.t1()), b = std::max(s.t0, s.t1());
    return t >= a && t <= b;
  };
  // steps are monotone in t0; binary search for the containing step
  auto it = std::partition_point(steps.begin(), steps.end(), [&](const DenseStep<2>& s) {
    return forward ? s.t1() < t : s.t1() > t;
  });
  if (it == steps.end() || !inside(*it)) {
    const double lo = std::min(samples.front().t, samples.back().t);
    const double hi = std::max(samples.front().t, samples.back().t);
    if (t < lo || t > hi) throw DomainError("dense output requested outside the span");
    if (it == steps.end()) --it;
  }
  const Vec<2> y = it->at(t);
  return {y[0], y[1]};
}

std::optional<EventHit> Trajectory::event(std::size_t index) const {
  for (const auto& e : events)
    if (e.index == index) return e;
  return std::nullopt;
}

EventHit Trajectory::require_event(std::size_t index) const {
  auto e = event(index);
  if (!e) throw NotReachableError("event not found in the integrated span");
  return *e;
}

double Trajectory::min_u() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::min(m, s.pt.u);
  return m;
}

namespace {

struct WeightedRhs {
  double weight, lambda, p;
  Vec<2> operator()(double, const Vec<2>& y) const {
    const double u = y[0];
    const double au = std::abs(u);
    // odd extension keeps trial stages past u = 0 finite
    const double up = au == 0.0 ? 0.0 : std::copysign(std::exp(p * std::log(au)), u);
    return {y[1], -lambda * u - weight * up};
  }
};

bool crosses(double g0, double g1, Crossing dir) {
  const bool up = g0 < 0.0 && g1 >= 0.0;
  const bool down = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case Crossing::up: return up;
    case Crossing::down: return down;
    case Crossing::any: return up || down;
  }
  return false;
}

PhasePoint to_pt(const Vec<2>& y) { return {y[0], y[1]}; }

}  // namespace

Trajectory integrate_weighted(const PhasePoint& start, double weight, double lambda, double p,
                              double t0, double t1, const std::vector<EventSpec>& events,
                              const OdeSettings& settings, bool record_steps) {
  if (!(start.u >= 0.0)) throw DomainError("start must have u >= 0");
  DormandPrince<2, WeightedRhs> stepper(WeightedRhs{weight, lambda, p}, settings);
  Trajectory traj;
  traj.samples.push_back({t0, start});
  const double dir = t1 >= t0 ? 1.0 : -1.0;

  std::vector<double> g_prev(events.size(), 0.0);
  std::vector<int> fired(events.size(), 0);
  std::vector<bool> done(events.size(), false);
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].kind == EventSpec::Kind::zero_crossing) {
      if (!events[i].function) throw DomainError("zero-crossing event without a function");
      g_prev[i] = events[i].function(t0, start);
    } else if (events[i].time == t0) {
      traj.events.push_back({t0, start, i});
      done[i] = true;
    }
  }

  bool halted = false;
  auto on_step = [&](const DenseStep<2>& step, const Vec<2>&, const Vec<2>& y1) {
    if (record_steps) traj.steps.push_back(step);
    const double ta = step.t0;
    const double tb = step.t1();
    struct Trigger {
      double t;
      Vec<2> y;
      std::ptrdiff_t index;  // -1: positivity boundary
    };
    std::vector<Trigger> triggers;
    if (y1[0] < 0.0) {
      auto g = [](double, const Vec<2>& y) { return y[0]; };
      auto [te, ye] = stepper.locate(step, step.r[0][0], y1[0], g);
      ye[0] = 0.0;
      triggers.push_back({te, ye, -1});
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (done[i]) continue;
      const EventSpec& ev = events[i];
      if (ev.kind == EventSpec::Kind::time_target) {
        if (dir * (ev.time - ta) > 0.0 && dir * (ev.time - tb) <= 0.0) {
          const Vec<2> ye = ev.time == tb ? y1 : stepper.single_step(ta, step.r[0], ev.time - ta);
          triggers.push_back({ev.time, ye, static_cast<std::ptrdiff_t>(i)});
        }
        continue;
      }
      const double g1 = ev.function(tb, to_pt(y1));
      if (crosses(g_prev[i], g1, ev.direction)) {
        auto g = [&ev](double t, const Vec<2>& y) { return ev.function(t, to_pt(y)); };
        auto [te, ye] = stepper.locate(step, g_prev[i], g1, g);
        triggers.push_back({te, ye, static_cast<std::ptrdiff_t>(i)});
      }
      g_prev[i] = g1;
    }
    std::sort(triggers.begin(), triggers.end(),
              [dir](const Trigger& a, const Trigger& b) { return dir * a.t < dir * b.t; });
    for (const auto& tr : triggers) {
      if (tr.index < 0) {
        traj.samples.push_back({tr.t, to_pt(tr.y)});
        traj.status = TrajectoryStatus::left_positive_region;
        halted = true;
        return false;
      }
      const auto i = static_cast<std::size_t>(tr.index);
      if (events[i].kind == EventSpec::Kind::zero_crossing && ++fired[i] < events[i].count)
        continue;
      done[i] = true;
      traj.events.push_back({tr.t, to_pt(tr.y), i});
      if (events[i].terminal) {
        traj.samples.push_back({tr.t, to_pt(tr.y)});
        traj.status = TrajectoryStatus::event_stop;
        halted = true;
        return false;
      }
    }
    traj.samples.push_back({tb, to_pt(y1)});
    return true;
  };

  const RunStatus rs = stepper.run(t0, {start.u, start.v}, t1, on_step);
  if (rs == RunStatus::step_limit) traj.status = TrajectoryStatus::step_limit;
  else if (!halted) traj.status = TrajectoryStatus::completed;
  return traj;
}

Trajectory integrate_central(const PhasePoint& start, double b, double lambda, double p,
                             double t_span, const std::vector<EventSpec>& events,
                             const OdeSettings& settings) {
  return integrate_weighted(start, b, lambda, p, 0.0, t_span, events, settings);
}

Trajectory integrate_outer(Side side, double slope0, const ProblemParams& params,
                           const OdeSettings& settings) {
  if (!(params.M > 0.0)) throw DomainError("M must be positive");
  const PhasePoint start{params.M, slope0};
  if (side == Side::left)
    return integrate_weighted(start, -params.c, params.lambda, params.p, 0.0, params.alpha, {},
                              settings);
  return integrate_weighted(start, -params.nu * params.c, params.lambda, params.p, 1.0,
                            1.0 - params.alpha, {}, settings);
}

Trajectory integrate_full(double slope0, const ProblemParams& params, const OdeSettings& settings,
                          bool record_steps) {
  if (!(params.M > 0.0)) throw DomainError("M must be positive");
  const double a = params.alpha;
  const double weights[3] = {-params.c, params.b, -params.nu * params.c};
  const double bounds[4] = {0.0, a, 1.0 - a, 1.0};
  Trajectory full;
  PhasePoint pt{params.M, slope0};
  for (int seg = 0; seg < 3; ++seg) {
    Trajectory part = integrate_weighted(pt, weights[seg], params.lambda, params.p, bounds[seg],
                                         bounds[seg + 1], {}, settings, record_steps);
    if (seg == 0) full.samples.push_back(part.samples.front());
    full.samples.insert(full.samples.end(), part.samples.begin() + 1, part.samples.end());
    full.steps.insert(full.steps.end(), part.steps.begin(), part.steps.end());
    full.status = part.status;
    if (part.status != TrajectoryStatus::completed) return full;
    pt = part.back().pt;
  }
  return full;
}

}  // namespace indefbif
