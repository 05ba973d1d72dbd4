#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "indefbif/solver.hpp"
#include "reference.hpp"

using namespace indefbif;

namespace {

void check_against_oracle(const std::vector<BvpSolution>& sols, const ProblemParams& pr,
                          const GammaCurve& g0) {
  const auto [lo, hi] = oracle_window(g0);
  const auto oracle = shooting_oracle(pr, lo, hi);
  REQUIRE(sols.size() == oracle.size());
  for (std::size_t i = 0; i < sols.size(); ++i) {
    CHECK(std::abs(sols[i].x_alpha - oracle[i].x_alpha) <= 1e-6);
    CHECK(std::abs(sols[i].slope0 - oracle[i].slope0) <= 1e-6);
  }
}

}  // namespace

TEST_CASE("solution set at b* matches the shooting oracle") {
  const double b = ref::b_star();
  const auto sols = solve_at(b, ref::gamma0(), ref::gamma1());
  CHECK(sols.size() >= 4);
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const auto& s = sols[i];
    CAPTURE(s.x_alpha);
    CHECK(!s.suspect);
    CHECK(s.min_u > 0.0);
    CHECK(s.residual <= 1e-7);
    if (i > 0) CHECK(s.x_alpha > sols[i - 1].x_alpha);
    if (s.symmetric_candidate) {
      for (std::size_t k = 0; k < s.profile.size(); ++k) {
        const auto& a = s.profile[k];
        const auto& c = s.profile[s.profile.size() - 1 - k];
        CHECK(std::abs(a[1] - c[1]) <= 1e-7);
      }
    }
  }
  check_against_oracle(sols, ref::params().with_b(b), ref::gamma0());
}

TEST_CASE("oracle agreement at random weights") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 3; ++k) {
    const bool perturbed = k == 2;
    const double b = ref::b_star() * (1.1 + 0.8 * U(rng));
    const GammaCurve& g0 = perturbed ? ref::gamma0_nu105() : ref::gamma0();
    const GammaCurve& g1 = perturbed ? ref::gamma1_nu105() : ref::gamma1();
    CAPTURE(b);
    const auto sols = solve_at(b, g0, g1);
    for (const auto& s : sols) CHECK(!s.suspect);
    check_against_oracle(sols, g0.params().with_b(b), g0);
  }
}

TEST_CASE("crossing index cap") {
  ProblemParams pr = ref::params();
  // L / tau_small lies in (1, 2) between lambda_2 and lambda_1
  CHECK(max_crossing_index(pr) == 4);
  pr.lambda = 0.5 * (lambda_threshold(2, 2.0, 0.25) + lambda_threshold(3, 2.0, 0.25));
  CHECK(max_crossing_index(pr) == 6);
}

TEST_CASE("solutions json") {
  const auto sols = solve_at(1.2 * ref::b_star(), ref::gamma0(), ref::gamma1());
  REQUIRE(!sols.empty());
  std::ostringstream os;
  write_solutions_json(os, sols, 10);
  const auto j = nlohmann::json::parse(os.str());
  REQUIRE(j.size() == sols.size());
  CHECK(j[0]["x_alpha"].get<double>() == sols[0].x_alpha);
  CHECK(j[0]["profile"].size() == 21);
  CHECK(j[0]["profile"][20][0].get<double>() == 1.0);
  CHECK(j[0].contains("x_1ma"));
}
