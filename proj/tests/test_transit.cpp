#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "indefbif/core.hpp"
#include "indefbif/error.hpp"
#include "indefbif/kernels.hpp"
#include "indefbif/ode.hpp"
#include "indefbif/transit.hpp"

using namespace indefbif;

TEST_CASE("turning points") {
  const Well w(1.0, -1.0, 2.0);
  SUBCASE("degenerate center level") {
    auto tp = turning_points(w, w.center_energy());
    CHECK(tp.x_m == w.center());
    CHECK(tp.x_M == w.center());
  }
  SUBCASE("E = -1/12") {
    const double E = -1.0 / 12.0;
    auto tp = turning_points(w, E);
    CHECK(tp.x_m > 0.0);
    CHECK(tp.x_m < 1.0);
    CHECK(tp.x_M > 1.0);
    CHECK(tp.x_M < 1.5);
    CHECK(std::abs(w.phi(tp.x_m) - E) <= 1e-12);
    CHECK(std::abs(w.phi(tp.x_M) - E) <= 1e-12);
    // independent bisection
    auto bisect = [&](double lo, double hi) {
      const double slo = w.phi(lo) - E;
      for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        ((w.phi(m) - E) * slo > 0 ? lo : hi) = m;
      }
      return 0.5 * (lo + hi);
    };
    CHECK(std::abs(tp.x_m - bisect(0.0, 1.0)) < 1e-12);
    CHECK(std::abs(tp.x_M - bisect(1.0, 1.5)) < 1e-12);
  }
  SUBCASE("homoclinic level") {
    auto tp = turning_points(0.0, 1.0, -1.0, 2.0);
    CHECK(tp.open);
    CHECK(tp.x_M == doctest::Approx(1.5));
    CHECK_THROWS_AS(turning_points(w, -1e-14), DomainError);
  }
  CHECK_THROWS_AS(turning_points(w, w.center_energy() - 0.01), DomainError);
}

TEST_CASE("quadrature matches an independent tanh-sinh oracle") {
  boost::math::quadrature::tanh_sinh<double> oracle;
  for (double p : {2.0, 3.0, 2.5}) {
    const Well w(1.0, -1.0, p);
    for (double frac : {0.1, 0.5, 0.9}) {
      const double E = w.center_energy() * frac;
      auto tp = turning_points(w, E);
      auto f = [&](double u, double dist) {
        // dist is the complement distance supplied by boost near the ends
        double g;
        if (dist != 0 && u < 0.5 * (tp.x_m + tp.x_M))
          g = w.gap(tp.x_m, std::abs(dist));
        else if (dist != 0)
          g = w.gap(tp.x_M, -std::abs(dist));
        else
          g = E - w.phi(u);
        return 1.0 / std::sqrt(g);
      };
      const double ref = oracle.integrate(f, tp.x_m, tp.x_M, 1e-13);
      const double got = transit(w, {tp.x_m, 0.0}, {tp.x_M, 0.0});
      CHECK(got == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("harmonic limit of the period") {
  const Well w(1.0, -1.0, 2.0);
  const double E = w.center_energy() + 1e-6;
  CHECK(std::abs(period(w, E) - small_oscillation_period(-1.0, 2.0)) < 1e-3);
}

TEST_CASE("period grows without bound toward the homoclinic and is monotone") {
  const Well w(1.0, -1.0, 2.0);
  double prev = 0.0;
  for (double frac : {0.99, 0.9, 0.5, 0.1, 1e-2, 1e-4, 1e-6, 1e-9}) {
    const double T = period(w, w.center_energy() * frac);
    CHECK(T > prev);
    prev = T;
  }
  CHECK(prev > 20.0);
}

TEST_CASE("additivity and ODE transit oracle") {
  const Well w(1.0, -1.0, 2.0);
  const double E = -0.2;
  auto tp = turning_points(w, E);
  const double whole = transit(w, {tp.x_m, 0.0}, {tp.x_M, 0.0});
  const double om = w.center();
  const double a = transit(w, {tp.x_m, 0.0}, {om, E - w.phi(om)});
  const double b = transit(w, {om, E - w.phi(om)}, {tp.x_M, 0.0});
  CHECK(a + b == doctest::Approx(whole).epsilon(1e-11));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    double u0 = tp.x_m + (tp.x_M - tp.x_m) * (0.02 + 0.96 * U(rng));
    double u1 = tp.x_m + (tp.x_M - tp.x_m) * (0.02 + 0.96 * U(rng));
    if (u0 > u1) std::swap(u0, u1);
    const double q = transit(w, {u0, E - w.phi(u0)}, {u1, E - w.phi(u1)});
    // flow along the upper branch from u0 until u = u1
    auto ev = EventSpec::crossing([u1](double, const PhasePoint& pt) { return pt.u - u1; },
                                  Crossing::up);
    OdeSettings st;
    st.rel_tol = 1e-12;
    st.abs_tol = 1e-14;
    auto tr = integrate_central({u0, std::sqrt(E - w.phi(u0))}, 1.0, -1.0, 2.0, 20.0, {ev}, st);
    CHECK(std::abs(tr.require_event(0).t - q) < 1e-8);
  }
}

TEST_CASE("errors") {
  const Well w(1.0, -1.0, 2.0);
  const double E = -0.2;
  auto tp = turning_points(w, E);
  CHECK_THROWS_AS(transit(w, {tp.x_m * 0.5, E - w.phi(tp.x_m * 0.5)}, {tp.x_M, 0.0}), DomainError);
  CHECK_THROWS_AS(transit(w, {w.center(), 0.0}, {tp.x_M, 0.0}), DomainError);
}

TEST_CASE("scalar and simd kernels give the same transit times") {
  const Well w(3.0, -2.0, 2.0);
  auto tp = turning_points(w, w.center_energy() * 0.3);
  kernels::set_isa_override(kernels::Isa::scalar);
  const double s = transit(w, {tp.x_m, 0.0}, {tp.x_M, 0.0});
  kernels::clear_isa_override();
  const double v = transit(w, {tp.x_m, 0.0}, {tp.x_M, 0.0});
  CHECK(v == doctest::Approx(s).epsilon(1e-13));
}
