#include <doctest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "indefbif/diagram.hpp"
#include "reference.hpp"

using namespace indefbif;

namespace {

const DiagramContext& ctx() {
  static const DiagramContext c(ref::params());
  return c;
}

const BifurcationPoint& b_plus() {
  static const BifurcationPoint p = find_bifurcation_point(ctx(), 1, +1);
  return p;
}

const Nu1Classification& cls() {
  static const Nu1Classification c = classify_nu1_point(ctx(), b_plus().b);
  return c;
}

}  // namespace

TEST_CASE("G is negative just above b* and positive just below b_h") {
  const double bs = ctx().b_star();
  CHECK(bs < ctx().b_h());
  CHECK(bifurcation_function(ctx(), 1, bs * 1.05) < 0.0);
  const double near_h = ctx().b_h() - 1e-4 * bs;
  CHECK(bifurcation_function(ctx(), 1, near_h) > 0.0);
}

TEST_CASE("largest up-crossing of G on (b*, b_h)") {
  const auto& p = b_plus();
  CHECK(p.b > ctx().b_star());
  CHECK(p.b < ctx().b_h());
  CHECK(p.g_before < 0.0);
  CHECK(p.g_after > 0.0);
  CHECK(std::abs(bifurcation_function(ctx(), 1, p.b)) < 1e-9);
  for (double c : p.crossings) CHECK(c <= p.b);
}

TEST_CASE("minus-side point lies below b*") {
  BifurcationSearchOptions opt;
  opt.n_scan = 24;
  const auto p = find_bifurcation_point(ctx(), 1, -1, opt);
  CHECK(p.b > 0.0);
  CHECK(p.b < ctx().b_star());
  CHECK(p.g_before > 0.0);
  CHECK(p.g_after < 0.0);
}

TEST_CASE("classification at b_b is a transversal pitchfork, stable under step halving") {
  const auto& c = cls();
  CAPTURE(c.detail);
  CHECK(c.type == NuOneType::transcritical_nondegenerate_pitchfork);
  CHECK(c.stable);
  CHECK(c.slope1 > 0.0);
  CHECK(std::abs(c.slope2) <= c.slope_tol);
  CHECK(std::abs(c.second2) > c.noise);
}

TEST_CASE("symmetric diagram: primary branch plus loop attached at b_b") {
  const double bs = ctx().b_star();
  const Diagram d = sweep(ctx(), 0.05 * bs, 1.8 * bs);
  CHECK(d.components == 1);
  CHECK(d.suspect_solutions == 0);
  REQUIRE(!d.attachments.empty());
  double best = 1e300;
  for (const auto& a : d.attachments) best = std::min(best, std::abs(a.b - b_plus().b));
  CHECK(best <= 1e-4 * bs);
  bool fold_above = false;
  for (const auto& t : d.turning_points)
    if (t.b > 1.7 * bs && t.kind == TurningKind::subcritical) fold_above = true;
  CHECK(fold_above);
}

TEST_CASE("beyond b_h there is no bifurcation") {
  const double bs = ctx().b_star();
  SweepOptions opt;
  opt.n_b = 8;
  const Diagram d = sweep(ctx(), ctx().b_h() * 1.001, ctx().b_h() + 0.5 * bs, opt);
  CHECK(d.branches <= 1);
  CHECK(d.turning_points.empty());
  CHECK(d.attachments.empty());
}

TEST_CASE("turning point is reproduced when the grid is doubled") {
  const double bs = ctx().b_star();
  SweepOptions coarse;
  coarse.n_b = 8;
  SweepOptions fine = coarse;
  fine.n_b = 16;
  const Diagram a = sweep(ctx(), 0.4 * bs, 0.7 * bs, coarse);
  const Diagram b = sweep(ctx(), 0.4 * bs, 0.7 * bs, fine);
  REQUIRE(a.turning_points.size() == 1);
  REQUIRE(b.turning_points.size() == 1);
  CHECK(std::abs(a.turning_points[0].b - b.turning_points[0].b) <= 2.0 * coarse.b_tol * bs);
}

TEST_CASE("exports are deterministic and use the fixed header") {
  const double bs = ctx().b_star();
  SweepOptions opt;
  opt.n_b = 6;
  const Diagram a = sweep(ctx(), 1.2 * bs, 1.4 * bs, opt);
  const Diagram b = sweep(ctx(), 1.2 * bs, 1.4 * bs, opt);
  std::ostringstream sa, sb;
  write_diagram_csv(sa, a);
  write_diagram_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("b,u_alpha,j,branch_id,component_id\n", 0) == 0);

  BifurcationReport r;
  r.b_star = bs;
  r.b_h = ctx().b_h();
  r.b_points.push_back({1, +1, b_plus().b});
  r.turning_points = a.turning_points;
  r.components = a.components;
  std::ostringstream ja, jb;
  write_report_json(ja, r);
  write_report_json(jb, r);
  CHECK(ja.str() == jb.str());
  const auto j = nlohmann::json::parse(ja.str());
  CHECK(j.at("b_points").at(0).at("b").get<double>() == b_plus().b);
  CHECK(j.at("b_points").at(0).at("sign") == "+");
  CHECK(j.at("imperfect").is_null());
}

TEST_CASE("perturbation above one gives a separated subcritical imperfect bifurcation") {
  const double bs = ctx().b_star();
  const auto r = imperfect_analysis(ctx(), b_plus().b, cls());
  for (const auto& n : r.notes) MESSAGE(n);
  CHECK(!r.degenerate);
  CHECK(r.nu > 1.0);
  CHECK(r.nu <= 1.05);
  CHECK(r.components == 2);
  CHECK(r.separated);
  CHECK(r.subcritical);
  CHECK(r.turning_b < b_plus().b);
  CHECK(r.turning_b > b_plus().b - 2.0 * r.delta_b);
  CHECK(r.shape == ImperfectCase::left);
  CHECK(std::abs(r.sweep_turning_b - r.turning_b) <= 1e-6 * bs);
  REQUIRE(r.gaps.size() == 3);
  CHECK(r.gap_monotone);
  for (std::size_t k = 1; k < r.gaps.size(); ++k) CHECK(r.gaps[k].gap < r.gaps[k - 1].gap);
}

TEST_CASE("reflected problem reproduces the solution sets") {
  const double bs = ctx().b_star();
  auto pr = ref::params(0.8);
  const auto r = reflection_check(pr, {0.7 * bs, 1.3 * bs});
  for (const auto& n : r.notes) MESSAGE(n);
  CHECK(r.ok);
  for (std::size_t k = 0; k < r.bs.size(); ++k) {
    CHECK(r.counts_direct[k] == r.counts_reflected[k]);
    CHECK(r.counts_solver[k] == r.counts_reflected[k]);
    CHECK(r.counts_direct[k] > 0);
  }
  CHECK(r.max_mismatch <= 1e-6);
}

TEST_CASE("reflection check rejects nu >= 1") {
  CHECK_THROWS_AS(reflection_check(ref::params(1.0), {ref::b_star()}), DomainError);
}
