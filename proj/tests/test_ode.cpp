#include <doctest.h>

#include <cmath>
#include <random>

#include "indefbif/core.hpp"
#include "indefbif/ode.hpp"

using namespace indefbif;

namespace {

PhasePoint random_closed_start(std::mt19937_64& rng, const Well& w) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  // pick a level strictly inside the homoclinic and a point on it
  for (;;) {
    const double u = w.center() * (0.2 + 1.1 * U(rng));
    const double room = -w.phi(u);
    if (room <= 0.0) continue;
    const double v = (2.0 * U(rng) - 1.0) * std::sqrt(room) * 0.95;
    return {u, v};
  }
}

}  // namespace

TEST_CASE("equilibrium stays put") {
  const Well w(1.0, -1.0, 2.0);
  auto tr = integrate_central({w.center(), 0.0}, 1.0, -1.0, 2.0, 5.0, {}, {});
  CHECK(tr.status == TrajectoryStatus::completed);
  CHECK(tr.back().pt.u == doctest::Approx(w.center()).epsilon(1e-14));
  CHECK(std::abs(tr.back().pt.v) < 1e-14);
}

TEST_CASE("central flow conserves the first integral") {
  const Well w(1.0, -1.0, 2.0);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const PhasePoint s = random_closed_start(rng, w);
    const double e0 = w.energy(s);
    auto tr = integrate_central(s, 1.0, -1.0, 2.0, 10.0, {}, {});
    REQUIRE(tr.status == TrajectoryStatus::completed);
    double drift = 0.0;
    for (const auto& smp : tr.samples) drift = std::max(drift, std::abs(w.energy(smp.pt) - e0));
    CHECK(drift <= 1e-8 * std::max(1.0, std::abs(e0)));
  }
}

TEST_CASE("small oscillation period") {
  const Well w(1.0, -1.0, 2.0);
  const PhasePoint s{w.center() + 1e-3, 0.0};
  auto ev = EventSpec::crossing([](double, const PhasePoint& pt) { return pt.v; }, Crossing::down);
  auto tr = integrate_central(s, 1.0, -1.0, 2.0, 20.0, {ev}, {});
  const auto hit = tr.require_event(0);
  CHECK(std::abs(hit.t - small_oscillation_period(-1.0, 2.0)) < 1e-4);
}

TEST_CASE("dense output matches re-integration to the midpoint") {
  OdeSettings st;
  auto tr = integrate_central({0.3, 0.2}, 1.0, -1.0, 2.0, 6.0, {}, st);
  REQUIRE(tr.steps.size() > 4);
  for (std::size_t i = 0; i < tr.steps.size(); i += 3) {
    const auto& step = tr.steps[i];
    const double tm = step.t0 + 0.5 * step.h;
    const PhasePoint a = tr.at(tm);
    const PhasePoint start = tr.at(step.t0);
    auto again = integrate_weighted(start, 1.0, -1.0, 2.0, step.t0, tm, {}, st);
    CHECK(std::abs(a.u - again.back().pt.u) < 10 * st.rel_tol);
    CHECK(std::abs(a.v - again.back().pt.v) < 10 * st.rel_tol);
  }
}

TEST_CASE("event times do not depend on the step cap") {
  auto ev = EventSpec::crossing([](double, const PhasePoint& pt) { return pt.u - 1.2; },
                                Crossing::up, 2);
  OdeSettings a;
  a.rel_tol = 1e-12;
  a.abs_tol = 1e-14;
  OdeSettings b = a;
  b.max_step = 0.05;
  OdeSettings c = a;
  c.max_step = 0.025;
  const double ta = integrate_central({0.4, 0.3}, 1.0, -1.0, 2.0, 40.0, {ev}, a).require_event(0).t;
  const double tb = integrate_central({0.4, 0.3}, 1.0, -1.0, 2.0, 40.0, {ev}, b).require_event(0).t;
  const double tc = integrate_central({0.4, 0.3}, 1.0, -1.0, 2.0, 40.0, {ev}, c).require_event(0).t;
  CHECK(std::abs(ta - tb) < 1e-10);
  CHECK(std::abs(tb - tc) < 1e-10);
}

TEST_CASE("missing event is reported") {
  auto ev = EventSpec::crossing([](double, const PhasePoint& pt) { return pt.u - 10.0; });
  auto tr = integrate_central({0.4, 0.3}, 1.0, -1.0, 2.0, 5.0, {ev}, {});
  CHECK_FALSE(tr.event(0).has_value());
  CHECK_THROWS(tr.require_event(0));
}

TEST_CASE("time targets are hit exactly and do not stop the run") {
  auto tr = integrate_central({0.4, 0.3}, 1.0, -1.0, 2.0, 5.0, {EventSpec::at_time(2.5)}, {});
  CHECK(tr.status == TrajectoryStatus::completed);
  const auto e = tr.require_event(0);
  CHECK(e.t == 2.5);
  const PhasePoint d = tr.at(2.5);
  CHECK(std::abs(d.u - e.pt.u) < 1e-9);
}

TEST_CASE("forward then backward returns to the start") {
  const PhasePoint s{0.5, 0.1};
  auto f = integrate_weighted(s, 1.0, -1.0, 2.0, 0.0, 7.0, {}, {});
  auto g = integrate_weighted(f.back().pt, 1.0, -1.0, 2.0, 7.0, 0.0, {}, {});
  CHECK(std::abs(g.back().pt.u - s.u) < 1e-8);
  CHECK(std::abs(g.back().pt.v - s.v) < 1e-8);
}

TEST_CASE("outer problems") {
  ProblemParams pr;
  pr.lambda = -200.0;
  pr.c = 0.1;
  SUBCASE("very negative slope leaves the positive region") {
    auto tr = integrate_outer(Side::left, -100.0, pr, {});
    CHECK(tr.left_positive_region());
    CHECK(tr.back().t < pr.alpha);
    CHECK(tr.back().pt.u == 0.0);
  }
  SUBCASE("symmetric right side mirrors the left") {
    for (double s : {-14.0, -13.5, -12.0}) {
      auto l = integrate_outer(Side::left, s, pr, {});
      auto r = integrate_outer(Side::right, -s, pr, {});
      REQUIRE(l.status == TrajectoryStatus::completed);
      REQUIRE(r.status == TrajectoryStatus::completed);
      CHECK(r.back().t == doctest::Approx(1.0 - pr.alpha));
      CHECK(l.back().pt.u == doctest::Approx(r.back().pt.u).epsilon(1e-12));
      CHECK(l.back().pt.v == doctest::Approx(-r.back().pt.v).epsilon(1e-12));
    }
  }
}

TEST_CASE("full problem conserves energy piecewise") {
  ProblemParams pr;
  pr.lambda = -200.0;
  pr.b = 50.0;
  pr.nu = 1.3;
  auto tr = integrate_full(-13.5, pr, {});
  REQUIRE(tr.status == TrajectoryStatus::completed);
  const double w[3] = {-pr.c, pr.b, -pr.nu * pr.c};
  const double cut[2] = {pr.alpha, 1.0 - pr.alpha};
  for (int seg = 0; seg < 3; ++seg) {
    const Well well(w[seg], pr.lambda, pr.p);
    double e_ref = NAN;
    for (const auto& s : tr.samples) {
      const bool in = (seg == 0 && s.t <= cut[0]) || (seg == 1 && s.t >= cut[0] && s.t <= cut[1]) ||
                      (seg == 2 && s.t >= cut[1]);
      if (!in) continue;
      const double e = s.pt.v * s.pt.v + pr.lambda * s.pt.u * s.pt.u +
                       2 * w[seg] / 3 * s.pt.u * s.pt.u * s.pt.u;
      if (std::isnan(e_ref)) e_ref = e;
      // the outer levels are small differences of O(|lambda|) terms
      const double scale = s.pt.v * s.pt.v + std::abs(pr.lambda) * s.pt.u * s.pt.u;
      CHECK(std::abs(e - e_ref) <= 1e-8 * std::max(1.0, scale));
    }
  }
  // the discontinuities are segment ends, never stepped over
  bool has_a = false, has_b = false;
  for (const auto& s : tr.samples) {
    has_a |= s.t == cut[0];
    has_b |= s.t == cut[1];
  }
  CHECK(has_a);
  CHECK(has_b);
}
