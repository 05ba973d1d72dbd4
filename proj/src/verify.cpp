#include "indefbif/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "indefbif/error.hpp"
#include "indefbif/ode.hpp"

namespace indefbif {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

// Shared state of one acceptance run; curves and the bifurcation point are
// built on first use.
class Suite {
 public:
  Suite(const RunConfig& cfg, unsigned seed) : cfg_(cfg), seed_(seed) {
    base_ = cfg.base_params();
    base_.nu = 1.0;
  }

  const DiagramContext& ctx() {
    if (!ctx_) ctx_ = std::make_unique<DiagramContext>(base_, cfg_.gamma_options());
    return *ctx_;
  }
  double b_star() { return ctx().b_star(); }

  const GammaCurve& gamma1_nu(double nu) {
    if (!g1n_) g1n_ = std::make_unique<GammaCurve>(
                   GammaCurve::build(Side::right, base_.with_nu(nu), cfg_.gamma_options()));
    return *g1n_;
  }

  const BifurcationPoint& b_plus() {
    if (!bp_) bp_ = find_bifurcation_point(ctx(), 1, +1);
    return *bp_;
  }

  CheckResult conservation();
  CheckResult quadrature_vs_ode();
  CheckResult harmonic_limit();
  CheckResult multiplicity();
  CheckResult symmetry();
  CheckResult bifurcation_point();
  CheckResult chains();
  CheckResult imperfect();
  CheckResult reflection();
  CheckResult curve_structure();

 private:
  RunConfig cfg_;
  unsigned seed_;
  ProblemParams base_;
  std::unique_ptr<DiagramContext> ctx_;
  std::unique_ptr<GammaCurve> g1n_;
  std::optional<BifurcationPoint> bp_;
};

CheckResult Suite::conservation() {
  CheckResult r{1, "central-flow energy conservation", false, {}};
  const double b = b_star();
  const Well w(b, base_.lambda, base_.p);
  std::mt19937_64 rng(seed_);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  int done = 0;
  while (done < 100) {
    // a start strictly inside the homoclinic loop lies on a closed orbit
    const double u = w.center() * (0.2 + 1.1 * U(rng));
    const double room = -w.phi(u);
    if (room <= 0.0) continue;
    const PhasePoint s{u, (2.0 * U(rng) - 1.0) * 0.95 * std::sqrt(room)};
    const double e0 = w.energy(s);
    const Trajectory tr = integrate_central(s, b, base_.lambda, base_.p, 10.0, {}, cfg_.ode);
    if (tr.status != TrajectoryStatus::completed) {
      r.detail = "orbit did not complete the span";
      return r;
    }
    double drift = 0.0;
    for (const auto& q : tr.samples) drift = std::max(drift, std::abs(w.energy(q.pt) - e0));
    worst = std::max(worst, drift / std::max(1.0, std::abs(e0)));
    ++done;
  }
  r.pass = worst <= 1e-8;
  r.detail = "100 orbits, span 10, max |dE|/max(1,|E0|) = " + sci(worst);
  return r;
}

CheckResult Suite::quadrature_vs_ode() {
  CheckResult r{2, "time-map quadrature vs ODE", false, {}};
  const double bs = b_star();
  const double bh = ctx().b_h();
  std::mt19937_64 rng(seed_ + 1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  int done = 0, tries = 0;
  while (done < 50 && tries < 1000) {
    ++tries;
    const bool perturbed = done % 2 == 1;
    const double b = bs + (0.02 + 0.96 * U(rng)) * (bh - bs);
    const TimeMaps tm(ctx().gamma0(), perturbed ? gamma1_nu(1.05) : ctx().gamma1(), b,
                      cfg_.timemap_options());
    const auto [lo, hi] = *tm.homoclinic0();
    const double x = lo + (hi - lo) * (0.02 + 0.96 * U(rng));
    const int j = 1 + static_cast<int>(4 * U(rng));
    const PhaseSlice s = tm.slice(x);
    if (s.open || s.hits_per_turn() == 0) continue;
    worst = std::max(worst, std::abs(s.tau(j) - tau_ode(tm, x, j)));
    ++done;
  }
  r.pass = done == 50 && worst <= 1e-6;
  r.detail = std::to_string(done) + " samples (nu = 1 and 1.05), max |dtau| = " + sci(worst);
  return r;
}

CheckResult Suite::harmonic_limit() {
  CheckResult r{3, "harmonic limit of the period", false, {}};
  const Well w(b_star(), base_.lambda, base_.p);
  const double e_c = w.center_energy();
  const double T = period(w, e_c + 1e-6 * std::abs(e_c));
  const double T0 = small_oscillation_period(base_.lambda, base_.p);
  const double err = std::abs(T - T0);
  r.pass = err <= 1e-3 && err <= 1e-3 * T0;
  r.detail = "T = " + fmt("%.9f", T) + ", 2pi/sqrt(-lambda(p-1)) = " + fmt("%.9f", T0) +
             ", |dT| = " + sci(err);
  return r;
}

CheckResult Suite::multiplicity() {
  CheckResult r{4, "multiplicity at b* vs shooting oracle", false, {}};
  const double b = b_star();
  const auto sols = solve_at(b, ctx().gamma0(), ctx().gamma1(), cfg_.solver_options());
  const auto [lo, hi] = oracle_window(ctx().gamma0());
  const auto oracle = shooting_oracle(base_.with_b(b), lo, hi, cfg_.oracle_options());
  int suspect = 0;
  for (const auto& s : sols) suspect += s.suspect ? 1 : 0;
  double worst = 0.0;
  if (sols.size() == oracle.size())
    for (std::size_t i = 0; i < sols.size(); ++i)
      worst = std::max(worst, std::abs(sols[i].x_alpha - oracle[i].x_alpha));
  r.pass = sols.size() >= 4 && sols.size() == oracle.size() && suspect == 0 && worst <= 1e-6;
  r.detail = "solver " + std::to_string(sols.size()) + ", oracle " + std::to_string(oracle.size()) +
             ", max |du(alpha)| = " + sci(worst);
  return r;
}

CheckResult Suite::symmetry() {
  CheckResult r{5, "symmetry identities (nu = 1)", false, {}};
  const double bs = b_star();
  const GammaCurve& g0 = ctx().gamma0();
  const GammaCurve& g1 = ctx().gamma1();
  double hit_err = 0.0, refl_err = 0.0, mirror_err = 0.0, profile_err = 0.0;
  bool ordered = true;
  for (double f : {1.1, 1.3, 1.6}) {
    const TimeMaps tm(g0, g1, f * bs, cfg_.timemap_options());
    const double xt = tm.tangency0().x_t;
    const auto [lo, hi] = *tm.homoclinic0();
    const double h = 0.05 * std::min(xt - lo, hi - xt);
    for (int i = 1; i <= 10; ++i) {
      for (double sg : {-1.0, 1.0}) {
        const double x = xt + sg * h * i / 10.0;
        const double x0 = tm.x0_partner(x);
        const OrbitGeometry g = tm.geometry(x);
        if (g.gamma1_hits.size() != 2) {
          r.detail = "orbit does not meet Gamma_1 twice";
          return r;
        }
        // hits of Gamma_1 are x and its Gamma_0 partner
        hit_err = std::max({hit_err, std::abs(g.gamma1_hits[0].x - std::min(x, x0)),
                            std::abs(g.gamma1_hits[1].x - std::max(x, x0))});
        const double t1 = tm.tau(x, 1).value, t2 = tm.tau(x, 2).value;
        const double th2 = tm.thetas(x).second;
        ordered = ordered && t1 < t2;
        refl_err = std::max(refl_err, std::abs(th2 - tm.thetas(x0).second));
      }
    }
  }
  double ymax = 0.0;
  for (const auto& q : g0.samples()) ymax = std::max(ymax, std::abs(q.y));
  for (int i = 1; i < 200; ++i) {
    const double x = std::min(g0.x_max(), g1.x_max()) * i / 200.0;
    mirror_err = std::max(mirror_err, std::abs(g1.y(x) + g0.y(x)) / ymax);
  }
  int n_sym = 0;
  for (double f : {1.0, 1.3}) {
    for (const auto& s : solve_at(f * bs, g0, g1, cfg_.solver_options())) {
      if (!s.symmetric_candidate) continue;
      ++n_sym;
      for (std::size_t k = 0; k < s.profile.size(); ++k)
        profile_err = std::max(
            profile_err, std::abs(s.profile[k][1] - s.profile[s.profile.size() - 1 - k][1]));
    }
  }
  r.pass = hit_err <= 1e-9 && ordered && refl_err <= 1e-7 && mirror_err <= 1e-9 && n_sym > 0 &&
           profile_err <= 1e-7;
  r.detail = "hits " + sci(hit_err) + ", ordering " + (ordered ? "strict" : "violated") +
             ", |theta2(x)-theta2(x0)| " + sci(refl_err) + ", mirror " + sci(mirror_err) +
             ", |u(t)-u(1-t)| " + sci(profile_err) + " on " + std::to_string(n_sym) +
             " symmetric solutions";
  return r;
}

CheckResult Suite::bifurcation_point() {
  CheckResult r{6, "bifurcation point b_b^{1,+}", false, {}};
  const double bs = b_star();
  const auto& bp = b_plus();
  const double g_near_star = bifurcation_function(ctx(), 1, 1.05 * bs);
  const double g_near_h = bifurcation_function(ctx(), 1, ctx().b_h() - 1e-4 * bs);
  SweepOptions so = cfg_.sweep_options();
  const double lo = std::min(cfg_.diagram.b_lo_rel * bs, 0.9 * bp.b);
  const double hi = std::max(cfg_.diagram.b_hi_rel * bs, bp.b + 0.01 * bs);
  const Diagram d = sweep(ctx(), lo, hi, so);
  double dist = INFINITY;
  for (const auto& a : d.attachments) dist = std::min(dist, std::abs(a.b - bp.b));
  const bool signs = bp.g_before < 0.0 && bp.g_after > 0.0 && g_near_star < 0.0 && g_near_h > 0.0;
  r.pass = signs && dist <= 1e-4 * bs;
  r.detail = "b_b/b* = " + fmt("%.10f", bp.b / bs) + ", G(b-d) = " + sci(bp.g_before) +
             ", G(b+d) = " + sci(bp.g_after) + ", G(1.05b*) = " + sci(g_near_star) +
             ", G(b_h-) = " + sci(g_near_h) + ", |attachment - b_b|/b* = " + sci(dist / bs) +
             ", components " + std::to_string(d.components);
  return r;
}

CheckResult Suite::chains() {
  CheckResult r{7, "perturbation chains at nu = 1.05", false, {}};
  const double bs = b_star();
  const double bb = b_plus().b;
  const double room = std::min(1e-3 * bs, 0.5 * (ctx().b_h() - bb));
  int ok = 0, n = 0;
  std::string first_fail;
  for (int k = 0; k < 20; ++k) {
    const double b = bb + room * (k % 5 - 2) / 2.0;
    const TimeMaps tm1(ctx().gamma0(), ctx().gamma1(), b, cfg_.timemap_options());
    const TimeMaps tmn(ctx().gamma0(), gamma1_nu(1.05), b, cfg_.timemap_options());
    const double xt = tm1.tangency0().x_t;
    const auto [lo, hi] = *tm1.homoclinic0();
    const double h = 0.02 * std::min(xt - lo, hi - xt);
    const int step = k / 5 + 1;
    const double x = xt + (k % 2 == 0 ? -1.0 : 1.0) * h * step / 4.0;
    ++n;
    const OrbitGeometry g1 = tm1.geometry(x), gn = tmn.geometry(x);
    bool pass = g1.gamma1_hits.size() == 2 && gn.gamma1_hits.size() == 2;
    if (pass) {
      const double x1 = g1.gamma1_hits[0].x, x2 = g1.gamma1_hits[1].x;
      const double xn1 = gn.gamma1_hits[0].x, xn2 = gn.gamma1_hits[1].x;
      const double t1 = tm1.tau(x, 1).value, t2 = tm1.tau(x, 2).value;
      const double tn1 = tmn.tau(x, 1).value, tn2 = tmn.tau(x, 2).value;
      pass = xn1 < x1 && x1 < xt && xt < x2 && x2 < xn2 && tn1 < t1 && t1 < t2 && t2 < tn2;
    }
    if (pass)
      ++ok;
    else if (first_fail.empty())
      first_fail = ", first failure at x = " + fmt("%.10g", x) + ", b/b* = " + fmt("%.8f", b / bs);
  }
  r.pass = ok == n;
  r.detail = std::to_string(ok) + "/" + std::to_string(n) + " samples satisfy both chains" + first_fail;
  return r;
}

CheckResult Suite::imperfect() {
  CheckResult r{8, "imperfect bifurcation for nu > 1", false, {}};
  const double bs = b_star();
  const auto& bp = b_plus();
  const Nu1Classification cls = classify_nu1_point(ctx(), bp.b);
  ImperfectOptions io;
  io.nu_start = cfg_.diagram.nu_start;
  io.sweep = cfg_.sweep_options();
  const ImperfectReport im = imperfect_analysis(ctx(), bp.b, cls, io);
  ImperfectCase expected = ImperfectCase::other;
  if (cls.type == NuOneType::transcritical_nondegenerate_pitchfork) expected = ImperfectCase::left;
  if (cls.type == NuOneType::double_pitchfork) expected = ImperfectCase::right;
  r.pass = !im.degenerate && im.nu > 1.0 && im.nu <= 1.05 && im.components == 2 && im.separated &&
           im.subcritical && im.turning_b < bp.b && im.shape == expected &&
           im.gaps.size() == 3 && im.gap_monotone;
  std::string gaps;
  for (const auto& g : im.gaps) gaps += (gaps.empty() ? "" : " > ") + sci(g.gap);
  r.detail = "nu = " + fmt("%.6g", im.nu) + ", components " + std::to_string(im.components) +
             (im.separated ? " disjoint" : " touching") + ", b_T/b* = " + fmt("%.10f", im.turning_b / bs) +
             " (" + (im.subcritical ? "subcritical" : "not subcritical") + "), case " +
             imperfect_case_name(im.shape) + " for " + nu_one_type_name(cls.type) +
             ", gaps " + gaps;
  return r;
}

CheckResult Suite::reflection() {
  CheckResult r{9, "reflection equivalence nu = 0.8 vs 1.25", false, {}};
  const double bs = b_star();
  ProblemParams pr = base_;
  pr.nu = 0.8;
  const auto rep = reflection_check(pr, {0.7 * bs, 1.3 * bs, 1.7 * bs}, cfg_.oracle_options());
  std::string counts;
  for (std::size_t k = 0; k < rep.bs.size(); ++k)
    counts += (counts.empty() ? "" : ", ") + std::to_string(rep.counts_direct[k]) + "/" +
              std::to_string(rep.counts_reflected[k]);
  r.pass = rep.ok;
  r.detail = "counts " + counts + ", max mismatch " + sci(rep.max_mismatch) +
             ", solver vs oracle " + sci(rep.max_solver_mismatch);
  return r;
}

CheckResult Suite::curve_structure() {
  CheckResult r{10, "boundary curve structure", false, {}};
  const GammaCurve& g = ctx().gamma0();
  const auto& s = g.samples();
  bool increasing = true;
  int zeros = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    increasing = increasing && s[i].x > s[i - 1].x && s[i].y > s[i - 1].y && s[i].dydx > 0.0;
    if ((s[i].y < 0.0) != (s[i - 1].y < 0.0)) ++zeros;
  }
  std::vector<GammaCurve> gs;
  for (double c : {0.05, 0.1, 0.2}) {
    ProblemParams pr = base_;
    pr.c = c;
    gs.push_back(GammaCurve::build(Side::left, pr, cfg_.gamma_options()));
  }
  bool ordered = true;
  for (std::size_t k = 0; k + 1 < gs.size(); ++k) {
    const double hi = std::min(gs[k].x_max(), gs[k + 1].x_max());
    for (int i = 1; i < 400; ++i) {
      const double x = hi * i / 400.0;
      ordered = ordered && gs[k + 1].y(x) > gs[k].y(x);
    }
  }
  r.pass = increasing && zeros == 1 && ordered;
  r.detail = std::string("Gamma_0 ") + (increasing ? "increasing" : "not increasing") + ", " +
             std::to_string(zeros) + " zero(s), m0 = " + fmt("%.12g", g.m0()) +
             ", y ordered in c: " + (ordered ? "yes" : "no");
  return r;
}

}  // namespace

std::vector<CheckResult> run_acceptance(const RunConfig& cfg, const VerifyOptions& opt) {
  Suite suite(cfg, opt.seed);
  using Fn = CheckResult (Suite::*)();
  const Fn checks[] = {&Suite::conservation,     &Suite::quadrature_vs_ode, &Suite::harmonic_limit,
                       &Suite::multiplicity,     &Suite::symmetry,          &Suite::bifurcation_point,
                       &Suite::chains,           &Suite::imperfect,         &Suite::reflection,
                       &Suite::curve_structure};
  static const char* names[] = {"central-flow energy conservation",
                                "time-map quadrature vs ODE",
                                "harmonic limit of the period",
                                "multiplicity at b* vs shooting oracle",
                                "symmetry identities (nu = 1)",
                                "bifurcation point b_b^{1,+}",
                                "perturbation chains at nu = 1.05",
                                "imperfect bifurcation for nu > 1",
                                "reflection equivalence nu = 0.8 vs 1.25",
                                "boundary curve structure"};
  // Runtime budgets of the checks that have one; curve construction is
  // shared setup and not charged to any check.
  const double budget[] = {10.0, 60.0, 0.0, 300.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  suite.ctx();
  std::vector<CheckResult> out;
  for (int id = 1; id <= 10; ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = (suite.*checks[id - 1])();
    } catch (const Error& e) {
      r = CheckResult{id, names[id - 1], false, std::string("error: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget[id - 1] > 0.0 && r.seconds > budget[id - 1]) {
      r.pass = false;
      r.detail += ", over the " + fmt("%.0f", budget[id - 1]) + " s budget";
    }
    if (opt.on_result) opt.on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CheckResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d  %-40s %8.2f s  ", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds);
  return head + r.detail;
}

}  // namespace indefbif
