#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "indefbif/error.hpp"
#include "indefbif/timemap.hpp"
#include "reference.hpp"

using namespace indefbif;

namespace {

double b_h() {
  static const double v = find_b_h(ref::gamma0(), ref::b_star(), 4.0 * ref::b_star());
  return v;
}

}  // namespace

TEST_CASE("quadrature agrees with direct integration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double nu : {1.0, 1.05}) {
    const GammaCurve& g0 = nu == 1.0 ? ref::gamma0() : ref::gamma0_nu105();
    const GammaCurve& g1 = nu == 1.0 ? ref::gamma1() : ref::gamma1_nu105();
    for (int k = 0; k < 4; ++k) {
      const double b = ref::b_star() + U(rng) * 0.95 * (b_h() - ref::b_star());
      const TimeMaps tm(g0, g1, b);
      const auto [lo, hi] = *tm.homoclinic0();
      for (int i = 0; i < 3; ++i) {
        const double x = lo + (hi - lo) * (0.05 + 0.9 * U(rng));
        const int j = 1 + static_cast<int>(4 * U(rng));
        const PhaseSlice s = tm.slice(x);
        if (s.hits_per_turn() == 0) continue;
        CAPTURE(nu);
        CAPTURE(b);
        CAPTURE(x);
        CAPTURE(j);
        CHECK(std::abs(s.tau(j) - tau_ode(tm, x, j)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("tau increases in j and repeats with the period") {
  const TimeMaps tm(ref::gamma0(), ref::gamma1(), 1.3 * ref::b_star());
  const auto [lo, hi] = *tm.homoclinic0();
  for (int i = 1; i < 20; ++i) {
    const double x = lo + (hi - lo) * i / 20.0;
    const PhaseSlice s = tm.slice(x);
    REQUIRE(!s.open);
    for (int j = 1; j <= 4; ++j) {
      CHECK(s.tau(j + 1) >= s.tau(j));
      CHECK(std::abs(s.tau(j + 2) - s.tau(j) - s.period) <= 1e-8);
    }
  }
}

TEST_CASE("symmetric identities near the tangency") {
  const double b = 1.3 * ref::b_star();
  const TimeMaps tm(ref::gamma0(), ref::gamma1(), b);
  REQUIRE(tm.symmetric());
  const double xt = tm.tangency0().x_t;
  const auto [lo, hi] = *tm.homoclinic0();
  const double h = 0.02 * std::min(xt - lo, hi - xt);
  for (int i = 1; i <= 10; ++i) {
    for (double sgn : {-1.0, 1.0}) {
      const double x = xt + sgn * h * i / 10.0;
      CAPTURE(x);
      const double x0 = tm.x0_partner(x);
      // the orbit meets Gamma_1 at x and at the partner
      const OrbitGeometry g = tm.geometry(x);
      REQUIRE(g.gamma1_hits.size() == 2);
      const double a = std::min(x, x0), c = std::max(x, x0);
      CHECK(g.gamma1_hits[0].x == doctest::Approx(a).epsilon(1e-9));
      CHECK(g.gamma1_hits[1].x == doctest::Approx(c).epsilon(1e-9));
      const double t1 = tm.tau(x, 1).value, t2 = tm.tau(x, 2).value;
      CHECK(t1 < t2);
      const auto [th1, th2] = tm.thetas(x);
      if (x < xt) {
        CHECK(th1 == doctest::Approx(t1).epsilon(1e-10));
        CHECK(th2 == doctest::Approx(t2).epsilon(1e-10));
      } else {
        CHECK(th1 == doctest::Approx(t2).epsilon(1e-10));
        CHECK(th2 == doctest::Approx(t1).epsilon(1e-10));
      }
      CHECK(std::abs(th2 - tm.thetas(x0).second) <= 1e-7);
    }
  }
  // theta_2 is even about the tangency: centred slope of order h
  const double d = 1e-3 * (hi - lo);
  const double slope = (tm.thetas(xt + d).second - tm.thetas(xt - d).second) / (2 * d);
  const double scale = std::abs(tm.thetas(xt + d).second - tm.thetas(xt).second) / d;
  CHECK(std::abs(slope) <= 0.1 * scale + 1e-9);
}

TEST_CASE("partner map is a decreasing involution") {
  const TimeMaps tm(ref::gamma0(), ref::gamma1(), 1.2 * ref::b_star());
  const auto [lo, hi] = *tm.homoclinic0();
  double prev = INFINITY;
  for (int i = 1; i < 40; ++i) {
    const double x = lo + (hi - lo) * i / 40.0;
    const double x0 = tm.x0_partner(x);
    CHECK(std::abs(tm.x0_partner(x0) - x) <= 1e-9 * x);
    CHECK(x0 < prev);
    prev = x0;
  }
}

TEST_CASE("theta maps blow up at the homoclinic end") {
  const TimeMaps tm(ref::gamma0(), ref::gamma1(), 1.2 * ref::b_star());
  const auto [lo, hi] = *tm.homoclinic0();
  double prev = 0.0;
  for (int k = 2; k <= 10; ++k) {
    const double x = lo + (hi - lo) * std::pow(10.0, -k);
    const auto [t1, t2] = tm.thetas(x);
    CHECK(t1 > prev);
    CHECK(t2 > t1);
    prev = t1;
  }
  CHECK_THROWS_AS(TimeMaps(ref::gamma0(), ref::gamma1_nu105(), ref::b_star()).thetas(lo * 1.5),
                  DomainError);
}

TEST_CASE("perturbed chains for nu = 1.05") {
  const double b = 1.7 * ref::b_star();
  const TimeMaps tm1(ref::gamma0(), ref::gamma1(), b);
  const TimeMaps tmn(ref::gamma0(), ref::gamma1_nu105(), b);
  const double xt = tm1.tangency0().x_t;
  for (int i = -10; i <= 10; ++i) {
    if (i == 0) continue;
    const double x = xt * (1.0 + 2e-3 * i);
    CAPTURE(x);
    const OrbitGeometry g1 = tm1.geometry(x), gn = tmn.geometry(x);
    REQUIRE(g1.gamma1_hits.size() == 2);
    REQUIRE(gn.gamma1_hits.size() == 2);
    CHECK(gn.gamma1_hits[0].x < g1.gamma1_hits[0].x);
    CHECK(g1.gamma1_hits[0].x <= xt);
    CHECK(xt <= g1.gamma1_hits[1].x);
    CHECK(g1.gamma1_hits[1].x < gn.gamma1_hits[1].x);
    const double tn1 = tmn.tau(x, 1).value, tn2 = tmn.tau(x, 2).value;
    const double t1 = tm1.tau(x, 1).value, t2 = tm1.tau(x, 2).value;
    CHECK(tn1 < t1);
    CHECK(t1 <= t2);
    CHECK(t2 < tn2);
  }
}

TEST_CASE("period grows with the energy") {
  const TimeMaps tm(ref::gamma0(), ref::gamma1(), 1.2 * ref::b_star());
  const Well& w = tm.well();
  const double e0 = w.center_energy();
  double prev = 0.0;
  for (double f : {0.999999, 0.9, 0.5, 0.1, 1e-3, 1e-6}) {
    const double T = period(w, f * e0);
    CHECK(T > prev);
    prev = T;
  }
  CHECK(period(w, e0 * (1.0 - 1e-6)) ==
        doctest::Approx(small_oscillation_period(w.lambda(), w.p())).epsilon(1e-3));
}

TEST_CASE("time map csv") {
  std::ostringstream os;
  write_timemap_csv(os, {{0.5, 1, 0.25, MapKind::theta1, -1.0}});
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header == "x,j,kind,value,E");
  CHECK(row.find("theta1") != std::string::npos);
}
