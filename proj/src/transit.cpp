#include "indefbif/transit.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "indefbif/error.hpp"
#include "indefbif/kernels.hpp"

namespace indefbif {

namespace {

// Root of phi(u) = E on [lo, hi] (sign change assumed), finished with a
// Newton step on the bracket-refined value.
double level_root(const Well& well, double E, double lo, double hi) {
  auto f = [&](double u) { return well.phi(u) - E; };
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                  boost::math::tools::eps_tolerance<double>(53),
                                                  iters);
  double x = 0.5 * (a + b);
  const double d = well.dphi(x);
  if (d != 0.0) {
    const double xn = x - f(x) / d;
    if (xn >= lo && xn <= hi && std::abs(f(xn)) <= std::abs(f(x))) x = xn;
  }
  return x;
}

}  // namespace

TurningPoints turning_points(const Well& well, double E, bool allow_open) {
  const double omega = well.center();
  const double e_min = well.center_energy();
  if (E < e_min) {
    if (E < e_min - 1e-14 * std::abs(e_min)) throw DomainError("energy below the well minimum");
    E = e_min;
  }
  // Rounding can put phi(omega) a few ulps above a level that is nominally
  // above e_min; such a level has collapsed onto the centre.
  if (E == e_min || well.phi(omega) >= E) return {omega, omega, false};
  if (!allow_open && E > -1e-12 * std::abs(e_min))
    throw DomainError("level too close to the homoclinic (or open)");

  TurningPoints tp;
  const double ext = well.extent();
  if (E < 0.0) {
    tp.x_m = level_root(well, E, 0.0, omega);
    // phi(extent) is zero only up to rounding; levels just below the
    // homoclinic need the bracket nudged past it.
    double hi = ext;
    for (double f = 1e-12; well.phi(hi) <= E && f < 1.0; f *= 16.0) hi = ext * (1.0 + f);
    tp.x_M = level_root(well, E, omega, hi);
    return tp;
  }
  tp.open = true;
  double hi = 2.0 * ext;
  while (well.phi(hi) < E) hi *= 2.0;
  // Same rounding issue at the extent for levels just above zero.
  tp.x_M = well.phi(ext) >= E ? level_root(well, E, omega, ext) : level_root(well, E, ext, hi);
  return tp;
}

TurningPoints turning_points(double E, double b, double lambda, double p) {
  return turning_points(Well(b, lambda, p), E, true);
}

QuadResult transit_quad(const Well& well, TransitEnd lo, TransitEnd hi, double rel_tol) {
  if (!(hi.u > lo.u)) {
    if (hi.u == lo.u) return {0.0, 0.0, 0, 0, true};
    throw DomainError("transit bounds out of order");
  }
  if (lo.e0 < 0.0 || hi.e0 < 0.0) throw DomainError("transit end outside the level set");
  for (const TransitEnd& end : {lo, hi}) {
    if (end.e0 == 0.0 && std::abs(well.dphi(end.u)) <=
                             1e-12 * std::abs(well.lambda()) * std::max(end.u, 1e-300))
      throw DomainError("turning point is not simple (degenerate center level)");
  }
  const auto& table = TanhSinhTable::instance();
  const double hw = 0.5 * (hi.u - lo.u);
  kernels::GapSumArgs left{lo.u, lo.e0, hw, well.lambda(), well.k(), well.q(), well.integer_q()};
  kernels::GapSumArgs right{hi.u, hi.e0, -hw, well.lambda(), well.k(), well.q(),
                            well.integer_q()};
  auto half = [&](int level, bool is_left) {
    return kernels::gap_sum(is_left ? left : right, table.z(level, is_left),
                            table.w(level, is_left));
  };
  std::size_t bad = 0;
  QuadResult res = tanh_sinh_integrate(hw, half, rel_tol, TanhSinhTable::kMaxLevel, 3, &bad);
  if (bad > 0) throw DomainError("integrand is not positive inside the transit interval");
  return res;
}

double transit(const Well& well, TransitEnd lo, TransitEnd hi, double rel_tol) {
  const QuadResult r = transit_quad(well, lo, hi, rel_tol);
  if (!r.converged)
    throw ResolutionError("transit quadrature did not converge (error " +
                          std::to_string(r.error / std::max(std::abs(r.value), 1e-300)) + ")");
  return r.value;
}

double transit_integral(double u_lo, double u_hi, double E, double b, double lambda, double p,
                        bool singular_lo, bool singular_hi) {
  const Well well(b, lambda, p);
  const TransitEnd lo{u_lo, singular_lo ? 0.0 : E - well.phi(u_lo)};
  const TransitEnd hi{u_hi, singular_hi ? 0.0 : E - well.phi(u_hi)};
  return transit(well, lo, hi);
}

double period(const Well& well, double E) {
  const TurningPoints tp = turning_points(well, E);
  if (tp.open) throw DomainError("open level has no period");
  return 2.0 * transit(well, {tp.x_m, 0.0}, {tp.x_M, 0.0});
}

double period(double E, double b, double lambda, double p) {
  return period(Well(b, lambda, p), E);
}

}  // namespace indefbif
