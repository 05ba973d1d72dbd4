#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "indefbif/core.hpp"
#include "indefbif/error.hpp"

using namespace indefbif;

TEST_CASE("weight is piecewise with the documented one-sided continuity") {
  ProblemParams pr;
  pr.alpha = 0.25;
  pr.c = 1.0;
  pr.b = 2.0;
  pr.nu = 3.0;
  CHECK(weight_at(0.1, pr) == -1.0);
  CHECK(weight_at(0.5, pr) == 2.0);
  CHECK(weight_at(0.9, pr) == -3.0);
  CHECK(weight_at(0.25, pr) == 2.0);
  CHECK(weight_at(0.75, pr) == 2.0);
  CHECK(weight_at(0.0, pr) == -1.0);
  CHECK(weight_at(1.0, pr) == -3.0);
  CHECK_THROWS_AS(weight_at(1.5, pr), DomainError);
  CHECK_THROWS_AS(weight_at(-0.1, pr), DomainError);
}

TEST_CASE("params validation") {
  ProblemParams pr;
  pr.b = 1.0;
  CHECK_NOTHROW(pr.validate());
  auto bad = pr;
  bad.lambda = 0.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = pr;
  bad.alpha = 0.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = pr;
  bad.M = INFINITY;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = pr;
  bad.p = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("reflected parameters swap the outer weights") {
  ProblemParams pr;
  pr.c = 0.1;
  pr.nu = 0.8;
  const auto r = pr.reflected();
  CHECK(r.c == doctest::Approx(0.08));
  CHECK(r.nu == doctest::Approx(1.25));
  for (double t : {0.05, 0.2, 0.5, 0.8, 0.95})
    CHECK(weight_at(t, r) == doctest::Approx(weight_at(1.0 - t, pr)));
  ProblemParams sym;
  sym.c = 0.1;
  CHECK(sym.reflected().c == sym.c);
  CHECK(sym.reflected().nu == 1.0);
}

TEST_CASE("energy and potential closed forms") {
  CHECK(energy_of({0, 0}, 1, -1, 2) == 0.0);
  CHECK(energy_of({1, 0}, 1, -1, 2) == doctest::Approx(-1.0 / 3.0));
  CHECK(energy_of({1, 0.5}, 1, -1, 2) == doctest::Approx(-1.0 / 12.0));
  CHECK(potential(0, 1, -1, 2) == 0.0);
  CHECK(potential(1, 1, -1, 2) == doctest::Approx(-1.0 / 3.0));
  CHECK(std::abs(potential(homoclinic_extent(1, -1, 2), 1, -1, 2)) < 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 3), V(-2, 2);
  for (int i = 0; i < 100; ++i) {
    const double u = U(rng), v = V(rng);
    CHECK(energy_of({u, v}, 1.7, -2.3, 2.5) - v * v ==
          doctest::Approx(potential(u, 1.7, -2.3, 2.5)).epsilon(1e-13));
  }
}

TEST_CASE("center and homoclinic") {
  CHECK(center_abscissa(1, -1, 2) == doctest::Approx(1.0));
  CHECK(center_abscissa(1, -4, 3) == doctest::Approx(2.0));
  CHECK_THROWS_AS(center_abscissa(0, -1, 2), DomainError);
  for (double p : {1.5, 2.0, 3.0, 4.2}) {
    const Well w(1.3, -2.0, p);
    CHECK(std::abs(w.dphi(w.center())) < 1e-13);
    CHECK(w.center_energy() < 0.0);
    CHECK(w.phi(1.01 * w.extent()) > 0.0);
  }
  CHECK(homoclinic_extent(1, -1, 2) == doctest::Approx(1.5));
  auto [vp, vm] = homoclinic_branch(0.0, 1, -1, 2);
  CHECK(vp == 0.0);
  CHECK(vm == 0.0);
  auto [ep, em] = homoclinic_branch(1.5, 1, -1, 2);
  CHECK(ep == 0.0);
  CHECK(em == 0.0);
  for (double u : {0.1, 0.5, 1.0, 1.4}) {
    auto [a, b] = homoclinic_branch(u, 1, -1, 2);
    CHECK(a == -b);
    CHECK(std::abs(a * a + potential(u, 1, -1, 2)) < 1e-12);
  }
  CHECK_THROWS_AS(homoclinic_branch(1.6, 1, -1, 2), DomainError);
}

TEST_CASE("lambda thresholds and small oscillations") {
  CHECK(lambda_threshold(1, 2, 0.25) == doctest::Approx(-16 * std::numbers::pi * std::numbers::pi));
  CHECK(lambda_threshold(2, 2, 0.25) == doctest::Approx(-64 * std::numbers::pi * std::numbers::pi));
  CHECK_THROWS_AS(lambda_threshold(0, 2, 0.25), DomainError);
  for (int j = 1; j < 6; ++j) {
    CHECK(lambda_threshold(j + 1, 2.5, 0.2) < lambda_threshold(j, 2.5, 0.2));
    const double l = lambda_threshold(j, 2.5, 0.2);
    const double w = 2 * std::numbers::pi * j / 0.6;
    CHECK(l * (1 - 2.5) / (w * w) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(small_oscillation_period(-1, 2) == doctest::Approx(2 * std::numbers::pi));
  for (double p : {1.5, 2.0, 3.0})
    for (double a : {0.1, 0.25, 0.4})
      CHECK(small_oscillation_period(lambda_threshold(1, p, a), p) ==
            doctest::Approx(1 - 2 * a).epsilon(1e-14));
}

TEST_CASE("critical weight puts the center on m0") {
  CHECK(critical_b_star(1, -1, 2) == doctest::Approx(1.0));
  for (double m0 : {0.01, 0.3, 2.0}) {
    const double bs = critical_b_star(m0, -7.0, 2.6);
    CHECK(center_abscissa(bs, -7.0, 2.6) == doctest::Approx(m0).epsilon(1e-13));
  }
}

TEST_CASE("cancellation-free gap agrees with the direct difference") {
  for (double p : {2.0, 3.0, 2.5}) {
    const Well w(2.0, -3.0, p);
    for (double r : {0.2, 0.9, 1.4})
      for (double d : {-0.1, 0.05, 0.3}) {
        const double direct = w.phi(r) - w.phi(r + d);
        CHECK(w.gap(r, d) == doctest::Approx(direct).epsilon(1e-11));
      }
    // relative accuracy survives tiny offsets
    const double r = 0.7, d = 1e-12;
    CHECK(w.gap(r, d) == doctest::Approx(-w.dphi(r) * d).epsilon(1e-9));
  }
}

TEST_CASE("pow of a negative base is a domain error") {
  CHECK_THROWS_AS(pow_nonneg(-1e-3, 2.5), DomainError);
  CHECK(pow_nonneg(0.0, 2.5) == 0.0);
  CHECK(pow_nonneg(4.0, 0.5) == doctest::Approx(2.0));
}
