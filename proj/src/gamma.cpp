#include "indefbif/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "indefbif/error.hpp"
#include "indefbif/kernels.hpp"
#include "indefbif/parallel.hpp"

namespace indefbif {

namespace {

struct VariationalRhs {
  double lambda, c, p;
  Vec<4> operator()(double, const Vec<4>& y) const {
    const double u = y[0];
    const double au = std::abs(u);
    double up = 0.0, dup = 0.0;  // |u|^p sign(u) and p |u|^{p-1}
    if (au > 0.0) {
      const double lp = std::exp((p - 1.0) * std::log(au));
      up = std::copysign(lp * au, u);
      dup = p * lp;
    }
    return {y[1], -lambda * u + c * up, y[3], (-lambda + c * dup) * y[2]};
  }
};

double hermite_eval(double x0, double x1, double f0, double f1, double d0, double d1, double x,
                    double* slope) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  if (slope) {
    const double g00 = (6 * t2 - 6 * t) / h, g10 = 3 * t2 - 4 * t + 1;
    const double g01 = (-6 * t2 + 6 * t) / h, g11 = 3 * t2 - 2 * t;
    *slope = g00 * f0 + g10 * d0 + g01 * f1 + g11 * d1;
  }
  return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
}

template <class F>
double root_in(F&& f, double lo, double hi, double flo, double fhi, int bits = 52) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                             boost::math::tools::eps_tolerance<double>(bits), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

OuterShooter::OuterShooter(double c_eff, const ProblemParams& params, const OdeSettings& settings)
    : c_(c_eff), params_(params), settings_(settings) {}

OuterShot OuterShooter::shoot(double s) const {
  DormandPrince<4, VariationalRhs> dp(VariationalRhs{params_.lambda, c_, params_.p}, settings_);
  OuterShot out;
  out.s = s;
  Vec<4> last{params_.M, s, 0.0, 1.0};
  auto on_step = [&](const DenseStep<4>&, const Vec<4>&, const Vec<4>& y) {
    if (y[0] < 0.0) out.positive = false;
    last = y;
    return true;
  };
  if (dp.run(0.0, last, params_.alpha, on_step) == RunStatus::step_limit)
    throw IntegrationError("outer shot exhausted its step budget");
  out.x = last[0];
  out.y = last[1];
  out.dx = last[2];
  out.dy = last[3];
  return out;
}

GammaCurve::GammaCurve(Side side, const ProblemParams& params, OuterShooter shooter)
    : side_(side), params_(params), shooter_(std::move(shooter)) {}

CurvePoint GammaCurve::to_point(const OuterShot& shot) const {
  const double sign = side_ == Side::left ? 1.0 : -1.0;
  return {shot.x, sign * shot.y, sign * shot.dy / shot.dx, boundary_slope(shot.s)};
}

GammaCurve GammaCurve::build(Side side, const ProblemParams& params, const GammaOptions& opt) {
  params.validate();
  const double c_eff = side == Side::left ? params.c : params.nu * params.c;
  GammaCurve curve(side, params, OuterShooter(c_eff, params, opt.ode));
  const OuterShooter& sh = curve.shooter_;
  const double sign = side == Side::left ? 1.0 : -1.0;

  const double w = std::sqrt(-params.lambda);
  const double s0 = -w * std::tanh(w * params.alpha) * params.M;

  // positivity boundary: x(s) = 0, continued smoothly through the odd
  // extension of the nonlinearity
  auto xs = [&](double s) { return sh.shoot(s).x; };
  double step = 0.01 * std::abs(s0) + 1e-3 * params.M;
  double s_hi = s0, s_lo = s0 - step;
  double x_hi = xs(s_hi);
  if (!(x_hi > 0.0)) throw ResolutionError("linear slope estimate does not give a positive shot");
  double x_lo = xs(s_lo);
  for (int k = 0; x_lo >= 0.0; ++k) {
    if (k > 200) throw ResolutionError("positivity boundary of the outer problem not found");
    s_hi = s_lo;
    x_hi = x_lo;
    step *= 2.0;
    s_lo -= step;
    x_lo = xs(s_lo);
  }
  const double s_min = root_in(xs, s_lo, s_hi, x_lo, x_hi);

  // m0: y(s) = 0
  auto ys = [&](double s) { return sh.shoot(s).y; };
  double a = s_min, ya = ys(a);
  if (ya >= 0.0) throw InvariantViolation("curve does not start below the u axis");
  step = 0.01 * std::abs(s0) + 1e-3 * params.M;
  double bnd = s0, yb = ys(bnd);
  for (int k = 0; yb <= 0.0; ++k) {
    if (k > 200) throw NotBracketedError("no zero of the boundary curve");
    a = bnd;
    ya = yb;
    step *= 2.0;
    bnd += step;
    yb = ys(bnd);
  }
  double sm = root_in(ys, std::max(a, s_min), bnd, ya, yb);
  for (int it = 0; it < 4; ++it) {  // secant-free Newton polish on fresh shots
    const OuterShot o = sh.shoot(sm);
    if (o.dy == 0.0) break;
    const double d = o.y / o.dy;
    sm -= d;
    if (std::abs(d) <= 1e-16 * std::abs(sm)) break;
  }
  const double m0 = sh.shoot(sm).x;

  // upper end of the sampled range
  const double x_top = opt.x_max_factor * m0;
  double s_top_lo = sm, s_top = sm;
  step = 0.01 * std::abs(s0) + 1e-3 * params.M;
  double x_top_v = m0;
  for (int k = 0; x_top_v < x_top; ++k) {
    if (k > 200) throw ResolutionError("could not reach the requested x range");
    s_top_lo = s_top;
    step *= 2.0;
    s_top += step;
    x_top_v = xs(s_top);
  }
  const double s_max =
      root_in([&](double s) { return xs(s) - x_top; }, s_top_lo, s_top, xs(s_top_lo) - x_top,
              x_top_v - x_top);

  const double x_res = opt.x_resolution > 0.0 ? opt.x_resolution : m0 / 400.0;

  // initial uniform slope grid, then midpoint refinement
  const int n0 = std::max(opt.initial_samples, 3);
  std::vector<OuterShot> shots(n0);
  parallel_for(n0, [&](std::size_t i) {
    const double s = s_min + (s_max - s_min) * static_cast<double>(i) / (n0 - 1);
    shots[i] = sh.shoot(s);
  });
  shots.front().x = std::max(shots.front().x, 0.0);

  double y_scale = 0.0;
  for (const auto& o : shots) y_scale = std::max(y_scale, std::abs(o.y));
  const double y_tol = opt.interp_tol * y_scale;

  std::vector<char> ok(shots.size() - 1, 0);
  for (;;) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i + 1 < shots.size(); ++i)
      if (!ok[i]) todo.push_back(i);
    if (todo.empty()) break;
    if (shots.size() + todo.size() > opt.max_samples)
      throw ResolutionError("boundary curve needs more samples than allowed");
    std::vector<OuterShot> mids(todo.size());
    parallel_for(todo.size(), [&](std::size_t k) {
      const std::size_t i = todo[k];
      mids[k] = sh.shoot(0.5 * (shots[i].s + shots[i + 1].s));
    });
    std::vector<OuterShot> next;
    std::vector<char> next_ok;
    next.reserve(shots.size() + todo.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < shots.size(); ++i) {
      next.push_back(shots[i]);
      if (i + 1 == shots.size()) break;
      if (ok[i]) {
        next_ok.push_back(1);
        continue;
      }
      const OuterShot& l = shots[i];
      const OuterShot& r = shots[i + 1];
      const OuterShot& m = mids[k++];
      bool good = r.x - l.x <= x_res && m.x > l.x && m.x < r.x;
      if (good) {
        const double pred =
            hermite_eval(l.x, r.x, l.y, r.y, l.dy / l.dx, r.dy / r.dx, m.x, nullptr);
        good = std::abs(pred - m.y) <= y_tol;
      }
      next.push_back(m);
      next_ok.push_back(good);
      next_ok.push_back(good);
    }
    shots.swap(next);
    ok.swap(next_ok);
  }

  if (shots.size() < 3) throw ResolutionError("fewer than three admissible curve samples");
  curve.samples_.reserve(shots.size());
  for (const auto& o : shots) {
    if (!o.positive && o.x > 0.0)
      throw InvariantViolation("admissible shot left the positive region");
    if (!(o.dx > 0.0)) throw InvariantViolation("endpoint abscissa not increasing in the slope");
    curve.samples_.push_back({o.x, sign * o.y, sign * o.dy / o.dx, o.s, o.dx});
  }
  for (std::size_t i = 0; i + 1 < curve.samples_.size(); ++i) {
    const auto& l = curve.samples_[i];
    const auto& r = curve.samples_[i + 1];
    if (!(r.x > l.x)) throw InvariantViolation("curve samples not strictly increasing in x");
    if (!(sign * (r.y - l.y) > 0.0))
      throw InvariantViolation("boundary curve is not strictly monotone");
  }

  // Fritsch-Carlson limiter on the exact slopes
  auto& smp = curve.samples_;
  curve.limited_.resize(smp.size());
  for (std::size_t i = 0; i < smp.size(); ++i) curve.limited_[i] = smp[i].dydx;
  for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
    const double delta = (smp[i + 1].y - smp[i].y) / (smp[i + 1].x - smp[i].x);
    const double al = curve.limited_[i] / delta, be = curve.limited_[i + 1] / delta;
    if (al < 0.0 || be < 0.0) throw InvariantViolation("curve slope has the wrong sign");
    const double r2 = al * al + be * be;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      curve.limited_[i] = tau * al * delta;
      curve.limited_[i + 1] = tau * be * delta;
    }
  }
  curve.m0_ = m0;
  curve.m0_s_ = sm;
  return curve;
}

std::size_t GammaCurve::interval_of(double x) const {
  if (!(x >= x_min() && x <= x_max())) throw DomainError("abscissa outside the curve range");
  auto it = std::upper_bound(samples_.begin(), samples_.end(), x,
                             [](double v, const GammaSample& s) { return v < s.x; });
  std::size_t i = static_cast<std::size_t>(it - samples_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, samples_.size() - 2);
}

double GammaCurve::hermite(std::size_t i, double x, double* slope) const {
  const auto& l = samples_[i];
  const auto& r = samples_[i + 1];
  return hermite_eval(l.x, r.x, l.y, r.y, limited_[i], limited_[i + 1], x, slope);
}

double GammaCurve::y(double x) const { return hermite(interval_of(x), x, nullptr); }

double GammaCurve::dydx(double x) const {
  double d;
  hermite(interval_of(x), x, &d);
  return d;
}

CurvePoint GammaCurve::shoot_slope(double s) const { return to_point(shooter_.shoot(s)); }

CurvePoint GammaCurve::shoot_at(double x) const {
  const std::size_t i = interval_of(x);
  const auto& l = samples_[i];
  const auto& r = samples_[i + 1];
  double s = hermite_eval(l.x, r.x, l.s, r.s, 1.0 / l.dxds, 1.0 / r.dxds, x, nullptr);
  s = std::clamp(s, l.s, r.s);
  OuterShot o = shooter_.shoot(s);
  for (int it = 0; it < 8; ++it) {
    const double d = (o.x - x) / o.dx;
    if (!std::isfinite(d)) break;
    s -= d;
    o = shooter_.shoot(s);
    if (std::abs(o.x - x) <= 4e-16 * std::max(std::abs(x), 1e-300)) break;
  }
  if (!(std::abs(o.x - x) <= 1e-13 * std::max(std::abs(x), x_max()))) {
    s = root_in([&](double v) { return shooter_.shoot(v).x - x; }, l.s, r.s, l.x - x, r.x - x);
    o = shooter_.shoot(s);
  }
  return to_point(o);
}

double GammaCurve::energy_on_curve(double x, double b) const {
  const double yy = y(x);
  return yy * yy + potential(x, b, params_.lambda, params_.p);
}

double GammaCurve::sample_energy(std::size_t i, const Well& well) const {
  return samples_[i].y * samples_[i].y + well.phi(samples_[i].x);
}

double GammaCurve::polish_extremum(double x_guess, std::size_t i, const Well& well) const {
  // dE/ds on fresh shots; y dy is side independent
  auto g = [&](double s) {
    const OuterShot o = shooter_.shoot(s);
    return 2.0 * o.y * o.dy + well.dphi(std::max(o.x, 0.0)) * o.dx;
  };
  const auto& l = samples_[i];
  const auto& r = samples_[i + 1];
  double lo = l.s, hi = r.s;
  double glo = (2.0 * l.y * l.dydx + well.dphi(l.x)) * l.dxds;
  double ghi = (2.0 * r.y * r.dydx + well.dphi(r.x)) * r.dxds;
  if (glo * ghi > 0.0) return x_guess;
  const double sg =
      std::clamp(hermite_eval(l.x, r.x, l.s, r.s, 1.0 / l.dxds, 1.0 / r.dxds, x_guess, nullptr),
                 lo, hi);
  const double gg = g(sg);
  if (gg == 0.0) return shooter_.shoot(sg).x;
  if ((gg < 0.0) == (glo < 0.0)) {
    lo = sg;
    glo = gg;
  } else {
    hi = sg;
    ghi = gg;
  }
  const double s = root_in(g, lo, hi, glo, ghi);
  return shooter_.shoot(s).x;
}

std::vector<CurveExtremum> GammaCurve::energy_extrema(double b) const {
  const Well well(b, params_.lambda, params_.p);
  const std::size_t n = samples_.size();
  std::vector<double> xs(n), ys(n), es(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = samples_[i].x;
    ys[i] = samples_[i].y;
  }
  kernels::energies(well.lambda(), well.k(), well.q(), well.integer_q(), xs, ys, es);
  std::vector<double> de(n);
  for (std::size_t i = 0; i < n; ++i)
    de[i] = 2.0 * samples_[i].y * samples_[i].dydx + well.dphi(samples_[i].x);

  std::vector<CurveExtremum> out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool down_up = de[i] < 0.0 && de[i + 1] >= 0.0;
    const bool up_down = de[i] > 0.0 && de[i + 1] <= 0.0;
    if (!down_up && !up_down) continue;
    if (i + 2 == n && de[i + 1] == 0.0) continue;
    const double sgn = down_up ? 1.0 : -1.0;
    auto f = [&](double x) { return sgn * (energy_on_curve(x, b)); };
    auto br = boost::math::tools::brent_find_minima(f, samples_[i].x, samples_[i + 1].x, 52);
    const double x = polish_extremum(br.first, i, well);
    const CurvePoint pt = shoot_at(x);
    out.push_back({pt.x, pt.y * pt.y + well.phi(pt.x), down_up});
  }
  return out;
}

double GammaCurve::polish_level(double E, const Well& well, double x_lo, double x_hi) const {
  auto f = [&](double x) { return energy_on_curve(x, well.b()) - E; };
  const double flo = f(x_lo), fhi = f(x_hi);
  // The node energies come from exact shots; when the level sits within
  // interpolation error of an extremum the interpolant may not bracket, and
  // the hit is that extremum.
  if (flo * fhi > 0.0) return std::abs(flo) < std::abs(fhi) ? x_lo : x_hi;
  return root_in(f, x_lo, x_hi, flo, fhi);
}

std::vector<CurveHit> GammaCurve::level_hits(double E, double b, bool exact) const {
  return level_hits(E, b, energy_extrema(b), exact);
}

std::vector<CurveHit> GammaCurve::level_hits(double E, double b,
                                             const std::vector<CurveExtremum>& ext,
                                             bool exact) const {
  const Well well(b, params_.lambda, params_.p);
  struct Node {
    double x, E;
    bool extremum;
  };
  std::vector<Node> nodes;
  nodes.push_back({x_min(), sample_energy(0, well), false});
  for (const auto& e : ext) nodes.push_back({e.x, e.E, true});
  nodes.push_back({x_max(), sample_energy(samples_.size() - 1, well), false});

  const double tol = 1e-13 * std::max({std::abs(E), std::abs(well.center_energy()), 1e-300});
  std::vector<CurveHit> hits;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].extremum && std::abs(nodes[k].E - E) <= tol)
      hits.push_back({nodes[k].x, y(nodes[k].x), 2});
  }
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double ea = nodes[k].E - E, eb = nodes[k + 1].E - E;
    const bool ta = nodes[k].extremum && std::abs(ea) <= tol;
    const bool tb = nodes[k + 1].extremum && std::abs(eb) <= tol;
    if (ta || tb) continue;
    if (!(ea * eb < 0.0) && !(eb == 0.0 && k + 2 == nodes.size())) continue;
    double x = polish_level(E, well, nodes[k].x, nodes[k + 1].x);
    double yy = y(x);
    if (exact) {
      const CurvePoint p0 = shoot_at(x);
      double s = side_ == Side::left ? p0.slope0 : -p0.slope0;
      for (int it = 0; it < 8; ++it) {
        const OuterShot o = shooter_.shoot(s);
        const double h = o.y * o.y + well.phi(std::max(o.x, 0.0)) - E;
        const double dh = 2.0 * o.y * o.dy + well.dphi(std::max(o.x, 0.0)) * o.dx;
        x = o.x;
        yy = (side_ == Side::left ? 1.0 : -1.0) * o.y;
        if (dh == 0.0 || std::abs(h) <= 1e-16 * std::max(std::abs(E), o.y * o.y)) break;
        s -= h / dh;
      }
    }
    hits.push_back({x, yy, 1});
  }
  std::sort(hits.begin(), hits.end(), [](const CurveHit& a, const CurveHit& b) { return a.x < b.x; });
  return hits;
}

void GammaCurve::write_csv(std::ostream& os) const {
  os << "x,y,slope0\n" << std::setprecision(17);
  for (const auto& s : samples_) os << s.x << ',' << s.y << ',' << boundary_slope(s.s) << '\n';
}

double find_m0(const GammaCurve& curve) { return curve.m0(); }

double energy_on_curve(const GammaCurve& curve, double x, double b) {
  return curve.energy_on_curve(x, b);
}

TangencyData tangent_orbit(const GammaCurve& curve, double b) {
  if (!(b > 0.0)) throw DomainError("tangency needs b > 0");
  return tangent_orbit(curve, b, curve.energy_extrema(b));
}

TangencyData tangent_orbit(const GammaCurve& curve, double b,
                           const std::vector<CurveExtremum>& ext) {
  if (!(b > 0.0)) throw DomainError("tangency needs b > 0");
  const Well well(b, curve.params().lambda, curve.params().p);
  const auto& smp = curve.samples();
  double sampled_min = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < smp.size(); ++i) {
    const double e = smp[i].y * smp[i].y + well.phi(smp[i].x);
    if (e < sampled_min) {
      sampled_min = e;
      arg = i;
    }
  }
  const CurveExtremum* best = nullptr;
  for (const auto& e : ext)
    if (e.minimum && (!best || e.E < best->E)) best = &e;
  if (!best || ((arg == 0 || arg + 1 == smp.size()) && sampled_min < best->E))
    throw ResolutionError("energy minimiser lies on the boundary of the curve range");
  TangencyData t;
  t.x_t = best->x;
  t.E_t = best->E;
  t.b = b;
  t.y_t = curve.shoot_at(best->x).y;
  for (const auto& e : ext)
    if (e.minimum && &e != best && std::abs(e.E - best->E) <= 1e-9 * std::abs(best->E))
      t.is_unique = false;
  return t;
}

double find_b_h(const GammaCurve& curve, double b_lo, double b_hi) {
  auto f = [&](double b) { return tangent_orbit(curve, b).E_t; };
  const double flo = f(b_lo), fhi = f(b_hi);
  if (!(flo < 0.0 && fhi > 0.0))
    throw NotBracketedError("tangent level does not cross the homoclinic level in the bracket");
  return root_in(f, b_lo, b_hi, flo, fhi, 50);
}

BhResult find_b_h(const GammaCurve& left, const GammaCurve& right, double b_lo, double b_hi) {
  BhResult r;
  r.b_h_left = find_b_h(left, b_lo, b_hi);
  r.b_h_right = left.params().symmetric() ? r.b_h_left : find_b_h(right, b_lo, b_hi);
  r.b_h = std::min(r.b_h_left, r.b_h_right);
  r.unique_tangency = tangent_orbit(left, r.b_h_left).is_unique &&
                      tangent_orbit(right, r.b_h_right).is_unique;
  return r;
}

std::pair<double, double> homoclinic_hits(const GammaCurve& curve, double b) {
  const TangencyData t = tangent_orbit(curve, b);
  if (!(t.E_t < 0.0)) throw DomainError("the homoclinic does not meet the curve (b >= b_h)");
  const auto hits = curve.level_hits(0.0, b, true);
  double lo = -1.0, hi = -1.0;
  for (const auto& h : hits) {
    if (h.x < t.x_t) lo = h.x;
    if (h.x > t.x_t && hi < 0.0) hi = h.x;
  }
  if (lo < 0.0 || hi < 0.0)
    throw ResolutionError("curve range does not cover both homoclinic intersections");
  return {lo, hi};
}

}  // namespace indefbif
