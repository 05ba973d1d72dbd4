#include "indefbif/timemap.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "indefbif/error.hpp"

namespace indefbif {

std::string_view map_kind_name(MapKind k) {
  switch (k) {
    case MapKind::tau: return "tau";
    case MapKind::theta1: return "theta1";
    case MapKind::theta2: return "theta2";
    case MapKind::period: return "period";
    case MapKind::tau_nu: return "tau_nu";
  }
  return "unknown";
}

double PhaseSlice::tau(int j) const {
  if (j < 1) throw DomainError("crossing index must be >= 1");
  const std::size_t n = hit_times.size();
  if (n == 0) throw NotReachableError("the orbit never meets the right boundary curve");
  const auto k = static_cast<std::size_t>(j - 1);
  if (open) {
    if (k >= n) throw NotReachableError("open orbit leaves the positive region first");
    return hit_times[k];
  }
  return hit_times[k % n] + static_cast<double>(k / n) * period;
}

namespace {

double wrap_time(double d, double T) {
  d = std::fmod(d, T);
  if (d <= 0.0) d += T;
  return d;
}

}  // namespace

TimeMaps::TimeMaps(const GammaCurve& gamma0, const GammaCurve& gamma1, double b,
                   const TimeMapOptions& opt)
    : g0_(gamma0), g1_(gamma1), b_(b), opt_(opt), well_(b, gamma0.params().lambda,
                                                          gamma0.params().p) {
  if (gamma0.side() != Side::left || gamma1.side() != Side::right)
    throw DomainError("time maps need (Gamma_0, Gamma_1) in this order");
  if (!(b > 0.0)) throw DomainError("time maps need b > 0");
  ext0_ = g0_.energy_extrema(b);
  ext1_ = symmetric() ? ext0_ : g1_.energy_extrema(b);
  t0_ = tangent_orbit(g0_, b, ext0_);
  t1_ = symmetric() ? t0_ : tangent_orbit(g1_, b, ext1_);
  if (symmetric()) t1_.y_t = -t0_.y_t;
  if (t0_.E_t < 0.0) {
    const auto hits = g0_.level_hits(0.0, b, ext0_, true);
    double lo = -1.0, hi = -1.0;
    for (const auto& h : hits) {
      if (h.x < t0_.x_t) lo = h.x;
      if (h.x > t0_.x_t && hi < 0.0) hi = h.x;
    }
    if (lo < 0.0 || hi < 0.0)
      throw ResolutionError("curve range does not cover both homoclinic intersections");
    h0_ = std::make_pair(lo, hi);
  }
}

bool TimeMaps::symmetric() const {
  return g0_.params().nu == 1.0 && g1_.c_eff() == g0_.c_eff();
}

double TimeMaps::start_y(double x) const {
  return opt_.exact_hits ? g0_.shoot_at(x).y : g0_.y(x);
}

double TimeMaps::energy_at(double x) const {
  const double y = start_y(x);
  return y * y + well_.phi(x);
}

bool TimeMaps::closed_at(double x) const { return energy_at(x) < 0.0; }

double TimeMaps::arc_from_right(double u, double v, const TurningPoints& tp, double T) const {
  if (u >= tp.x_M) return 0.0;
  const double e0 = v * v;
  if (!tp.open) {
    if (u <= tp.x_m) return 0.5 * T;
    if (u - tp.x_m < tp.x_M - u)
      return 0.5 * T - transit(well_, {tp.x_m, 0.0}, {u, e0}, opt_.quad_tol);
  }
  return transit(well_, {u, e0}, {tp.x_M, 0.0}, opt_.quad_tol);
}

double TimeMaps::phase(double u, double v, const TurningPoints& tp, double T) const {
  if (v == 0.0) {
    if (tp.open) return 0.0;
    return (u - tp.x_m < tp.x_M - u) ? 0.5 * T : 0.0;
  }
  const double a = arc_from_right(u, v, tp, T);
  return v > 0.0 ? -a : a;
}

PhaseSlice TimeMaps::slice(double x) const {
  PhaseSlice s;
  s.x = x;
  s.y = start_y(x);
  s.E = s.y * s.y + well_.phi(x);
  const TurningPoints tp = turning_points(well_, s.E, s.E >= 0.0);
  s.open = tp.open;
  if (!tp.open) s.period = 2.0 * transit(well_, {tp.x_m, 0.0}, {tp.x_M, 0.0}, opt_.quad_tol);
  const double ps = phase(x, s.y, tp, s.period);
  const auto hits = g1_.level_hits(s.E, b_, ext1_, opt_.exact_hits);
  std::vector<std::pair<double, double>> th;
  for (const auto& h : hits) {
    const double u = std::clamp(h.x, tp.x_m, tp.x_M);
    double d = phase(u, h.y, tp, s.period) - ps;
    if (tp.open) {
      if (!(d > 0.0)) continue;
    } else {
      d = wrap_time(d, s.period);
    }
    for (int m = 0; m < h.multiplicity; ++m) th.emplace_back(d, h.x);
  }
  std::sort(th.begin(), th.end());
  for (const auto& [d, xi] : th) {
    s.hit_times.push_back(d);
    s.hit_abscissas.push_back(xi);
  }
  return s;
}

OrbitGeometry TimeMaps::geometry(double x) const {
  OrbitGeometry g;
  g.E = energy_at(x);
  const TurningPoints tp = turning_points(well_, g.E, g.E >= 0.0);
  g.x_m = tp.x_m;
  g.x_M = tp.x_M;
  g.open = tp.open;
  g.gamma0_hits = g0_.level_hits(g.E, b_, ext0_, opt_.exact_hits);
  g.gamma1_hits = g1_.level_hits(g.E, b_, ext1_, opt_.exact_hits);
  return g;
}

TimeMapSample TimeMaps::tau(double x, int j) const {
  const PhaseSlice s = slice(x);
  return {x, j, s.tau(j), symmetric() ? MapKind::tau : MapKind::tau_nu, s.E};
}

double TimeMaps::x0_partner(double x) const {
  const double E = energy_at(x);
  const auto hits = g0_.level_hits(E, b_, ext0_, opt_.exact_hits);
  if (hits.empty()) throw InvariantViolation("start point not found on its own level");
  std::size_t self = 0;
  for (std::size_t i = 1; i < hits.size(); ++i)
    if (std::abs(hits[i].x - x) < std::abs(hits[self].x - x)) self = i;
  if (hits[self].multiplicity == 2) return x;
  const bool left_of_t = x < t0_.x_t;
  double best = x;
  double best_dist = INFINITY;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (i == self) continue;
    if ((hits[i].x < t0_.x_t) == left_of_t) continue;
    const double d = std::abs(hits[i].x - t0_.x_t);
    if (d < best_dist) {
      best_dist = d;
      best = hits[i].x;
    }
  }
  return best;
}

std::pair<double, double> TimeMaps::thetas(double x) const {
  if (!symmetric()) throw DomainError("theta maps need nu = 1");
  const double y = start_y(x);
  const double E = y * y + well_.phi(x);
  if (!(E < 0.0)) throw DomainError("theta maps need a closed orbit");
  const TurningPoints tp = turning_points(well_, E);
  const double T = 2.0 * transit(well_, {tp.x_m, 0.0}, {tp.x_M, 0.0}, opt_.quad_tol);
  const double ps = phase(x, y, tp, T);
  const double x0 = x0_partner(x);
  double p0 = ps;
  if (x0 != x) {
    const double y0 = start_y(x0);
    p0 = phase(std::clamp(x0, tp.x_m, tp.x_M), y0, tp, T);
  }
  return {wrap_time(-2.0 * ps, T), wrap_time(-p0 - ps, T)};
}

TimeMapSample TimeMaps::theta(double x, int which) const {
  if (which != 1 && which != 2) throw DomainError("theta index must be 1 or 2");
  const auto [t1, t2] = thetas(x);
  return {x, which, which == 1 ? t1 : t2, which == 1 ? MapKind::theta1 : MapKind::theta2,
          energy_at(x)};
}

TimeMapSample TimeMaps::period_at(double x) const {
  const double E = energy_at(x);
  return {x, 1, period(well_, E), MapKind::period, E};
}

std::vector<CurveHit> curve_hits(double E, double b, const GammaCurve& curve) {
  return curve.level_hits(E, b);
}

double tau_ode(const TimeMaps& tm, double x, int j, const OdeSettings& settings,
               double max_step_fraction) {
  const GammaCurve& g1 = tm.gamma1();
  const ProblemParams& pr = g1.params();
  const PhasePoint start{x, tm.gamma0().shoot_at(x).y};
  auto side = [&](double, const PhasePoint& q) {
    return q.v - g1.y(std::clamp(q.u, g1.x_min(), g1.x_max()));
  };
  OdeSettings s = settings;
  const double Ts = small_oscillation_period(pr.lambda, pr.p);
  s.max_step = max_step_fraction * Ts;
  // generous span: every revolution is longer than Ts but near-homoclinic
  // ones can be much longer
  double span = (j + 1) * Ts;
  for (int attempt = 0; attempt < 8; ++attempt, span *= 4.0) {
    const Trajectory tr = integrate_central(start, tm.b(), pr.lambda, pr.p, span,
                                            {EventSpec::crossing(side, Crossing::any, j)}, s);
    if (auto hit = tr.event(0)) return hit->t;
    if (tr.status == TrajectoryStatus::left_positive_region)
      throw NotReachableError("flow leaves u > 0 before the requested crossing");
  }
  throw NotReachableError("requested crossing not reached");
}

void write_timemap_csv(std::ostream& os, const std::vector<TimeMapSample>& samples) {
  os << "x,j,kind,value,E\n" << std::setprecision(17);
  for (const auto& s : samples)
    os << s.x << ',' << s.j << ',' << map_kind_name(s.kind) << ',' << s.value << ',' << s.E
       << '\n';
}

}  // namespace indefbif
