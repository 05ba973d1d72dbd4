#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "indefbif/error.hpp"
#include "indefbif/ode.hpp"
#include "reference.hpp"

using namespace indefbif;

TEST_CASE("Gamma_0 is an increasing graph with one zero") {
  const GammaCurve& g = ref::gamma0();
  const auto& s = g.samples();
  REQUIRE(s.size() > 100);
  int sign_changes = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s[i].x > s[i - 1].x);
    CHECK(s[i].y > s[i - 1].y);
    if ((s[i].y < 0.0) != (s[i - 1].y < 0.0)) ++sign_changes;
  }
  for (const auto& q : s) CHECK(q.dydx > 0.0);
  CHECK(sign_changes == 1);
  CHECK(g.m0() > s.front().x);
  CHECK(std::abs(g.shoot_at(g.m0()).y) < 1e-10);
  CHECK(g.x_min() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("interpolant agrees with fresh shots") {
  const GammaCurve& g = ref::gamma0();
  double ymax = 0.0;
  for (const auto& q : g.samples()) ymax = std::max(ymax, std::abs(q.y));
  const double lo = g.x_min(), hi = g.x_max();
  for (int i = 0; i < 100; ++i) {
    // off-sample abscissas, irrational spacing
    const double x = lo + (hi - lo) * std::fmod(0.013 + i * 0.61803398875, 1.0);
    const CurvePoint p = g.shoot_at(x);
    CHECK(std::abs(p.x - x) < 1e-12);
    CHECK(std::abs(p.y - g.y(x)) <= 1e-8 * ymax);
    // the shot really solves the left outer problem
    const Trajectory tr = integrate_outer(Side::left, p.slope0, g.params(), {1e-12, 1e-14});
    CHECK(std::abs(tr.back().pt.u - x) < 1e-9);
    CHECK(std::abs(tr.back().pt.v - p.y) < 1e-8 * ymax);
  }
  CHECK_THROWS_AS(g.y(hi * 2.0), DomainError);
}

TEST_CASE("Gamma_{1,1} mirrors Gamma_0") {
  const GammaCurve& g0 = ref::gamma0();
  const GammaCurve& g1 = ref::gamma1();
  CHECK(g1.m0() == doctest::Approx(g0.m0()).epsilon(1e-10));
  double ymax = 0.0;
  for (const auto& q : g0.samples()) ymax = std::max(ymax, std::abs(q.y));
  for (int i = 1; i < 50; ++i) {
    const double x = g0.x_max() * i / 50.0;
    CHECK(std::abs(g1.y(x) + g0.y(x)) <= 1e-9 * ymax);
    // independent backward integration from t = 1
    const CurvePoint p = g1.shoot_at(x);
    const Trajectory tr = integrate_outer(Side::right, p.slope0, g1.params(), {1e-12, 1e-14});
    CHECK(std::abs(tr.back().pt.u - x) < 1e-9);
    CHECK(std::abs(tr.back().pt.v - p.y) < 1e-8 * ymax);
  }
}

TEST_CASE("curves increase with the absorption c") {
  // y0^{c'}(x) > y0^{c}(x) for c' > c on the common range
  std::vector<GammaCurve> gs;
  for (double c : {0.05, 0.1, 0.2}) {
    ProblemParams pr = ref::params();
    pr.c = c;
    gs.push_back(GammaCurve::build(Side::left, pr));
  }
  for (std::size_t k = 0; k + 1 < gs.size(); ++k) {
    const double hi = std::min(gs[k].x_max(), gs[k + 1].x_max());
    for (int i = 1; i < 200; ++i) {
      const double x = hi * i / 200.0;
      CHECK(gs[k + 1].y(x) > gs[k].y(x));
    }
    CHECK(gs[k + 1].m0() < gs[k].m0());
  }
  // right curves of nu c: -y ordered the same way
  const GammaCurve& r1 = ref::gamma1();
  const GammaCurve& r105 = ref::gamma1_nu105();
  for (int i = 1; i < 50; ++i) {
    const double x = r105.x_max() * i / 50.0;
    CHECK(-r105.y(x) > -r1.y(x));
  }
}

TEST_CASE("tangency, b_h and homoclinic hits") {
  const GammaCurve& g = ref::gamma0();
  const ProblemParams pr = ref::params();
  const double bs = ref::b_star();
  CHECK(bs == doctest::Approx(-pr.lambda / g.m0()));

  const TangencyData t = tangent_orbit(g, bs);
  CHECK(t.is_unique);
  // the tangent orbit is the energy minimiser along the curve
  for (int i = -5; i <= 5; ++i) {
    if (i == 0) continue;
    const double x = t.x_t * (1.0 + 0.01 * i);
    CHECK(g.energy_on_curve(x, bs) > t.E_t);
  }
  const Well w(bs, pr.lambda, pr.p);
  CHECK(t.E_t >= w.center_energy() - 1e-12 * std::abs(w.center_energy()));
  CHECK(t.E_t < 0.0);

  const double bh = find_b_h(g, bs, 4.0 * bs);
  CHECK(bh > bs);
  CHECK(std::abs(tangent_orbit(g, bh).E_t) < 1e-10 * std::abs(w.center_energy()));
  const BhResult both = find_b_h(g, ref::gamma1(), bs, 4.0 * bs);
  CHECK(both.b_h_left == doctest::Approx(both.b_h_right).epsilon(1e-9));

  const auto [xl, xr] = homoclinic_hits(g, bs);
  CHECK(xl < t.x_t);
  CHECK(xr > t.x_t);
  CHECK(std::abs(g.energy_on_curve(xl, bs)) < 1e-10);
  CHECK(std::abs(g.energy_on_curve(xr, bs)) < 1e-10);
  CHECK_THROWS(homoclinic_hits(g, 1.01 * bh));
}

TEST_CASE("level hits and csv") {
  const GammaCurve& g = ref::gamma0();
  const double bs = ref::b_star();
  const TangencyData t = tangent_orbit(g, bs);
  CHECK(g.level_hits(t.E_t * 1.001, bs).empty());
  const auto h = g.level_hits(0.5 * t.E_t, bs);
  REQUIRE(h.size() == 2);
  for (const auto& q : h) CHECK(g.energy_on_curve(q.x, bs) == doctest::Approx(0.5 * t.E_t));
  const auto tan_hits = g.level_hits(t.E_t, bs, true);
  REQUIRE(!tan_hits.empty());
  CHECK(tan_hits.front().multiplicity == 2);

  std::ostringstream os;
  g.write_csv(os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "x,y,slope0");
  std::size_t rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == g.samples().size());
}
