#include "indefbif/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <nlohmann/json.hpp>

#include "indefbif/error.hpp"
#include "indefbif/parallel.hpp"

namespace indefbif {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
double toms_root(F&& f, double lo, double hi, double flo, double fhi, int bits = 50) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                             boost::math::tools::eps_tolerance<double>(bits), iters);
  return 0.5 * (r.first + r.second);
}

double central_length(const ProblemParams& p) { return 1.0 - 2.0 * p.alpha; }

double find_b_h_expanding(const GammaCurve& g0, const GammaCurve& g1, double b_star) {
  double hi = 4.0 * b_star;
  for (int k = 0; k < 6; ++k, hi *= 2.0) {
    try {
      return find_b_h(g0, g1, b_star, hi).b_h;
    } catch (const NotBracketedError&) {
    }
  }
  throw NotBracketedError("tangent level stays below the homoclinic level up to 128 b*");
}

// ---------------------------------------------------------------------------
// Sweep

struct LevelPoint {
  double u, u1;
  int j;
  bool sym;
};

struct Level {
  double b;
  std::vector<LevelPoint> pts;  // sorted by u
  int suspects = 0;
};

Level solve_level(double b, const GammaCurve& g0, const GammaCurve& g1, const SolverOptions& opt,
                  std::vector<std::string>& notes) {
  Level lv{b, {}, 0};
  try {
    for (const auto& s : solve_at(b, g0, g1, opt)) {
      if (s.suspect) {
        ++lv.suspects;
        continue;
      }
      lv.pts.push_back({s.x_alpha, s.x_one_minus_alpha, s.j, s.symmetric_candidate});
    }
  } catch (const Error& e) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", b);
    notes.push_back(std::string("solve failed at b = ") + buf + ": " + e.what());
  }
  std::sort(lv.pts.begin(), lv.pts.end(),
            [](const LevelPoint& a, const LevelPoint& c) { return a.u < c.u; });
  return lv;
}

struct Branch {
  std::vector<std::pair<int, int>> pts;  // (level, index)
  int first() const { return pts.front().first; }
  int last() const { return pts.back().first; }
};

struct Linking {
  std::vector<Branch> branches;
  std::set<int> ambiguous;  // interval k = (k, k + 1)
};

Linking link_levels(const std::vector<Level>& lv, double ratio) {
  Linking out;
  auto& br = out.branches;
  std::vector<int> active;
  for (std::size_t q = 0; q < (lv.empty() ? 0 : lv[0].pts.size()); ++q) {
    br.push_back({{{0, static_cast<int>(q)}}});
    active.push_back(static_cast<int>(br.size()) - 1);
  }
  for (int k = 1; k < static_cast<int>(lv.size()); ++k) {
    const auto& prev = lv[k - 1].pts;
    const auto& cur = lv[k].pts;
    struct Pred {
      double u, r;
      int j;
      bool sym;
    };
    std::vector<Pred> pred(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      const Branch& B = br[active[a]];
      const auto& p1 = prev[B.pts.back().second];
      const double floor = 1e-8 * std::max(std::abs(p1.u), 1e-300);
      if (B.pts.size() >= 2) {
        const auto [k0, i0] = B.pts[B.pts.size() - 2];
        const double u0 = lv[k0].pts[i0].u;
        const double s = (lv[k].b - lv[k - 1].b) / (lv[k - 1].b - lv[k0].b);
        const double step = (p1.u - u0) * s;
        pred[a] = {p1.u + step, 3.0 * std::max(std::abs(step), floor), p1.j, p1.sym};
      } else {
        double gap = std::abs(p1.u);
        for (const auto& o : prev)
          if (&o != &p1) gap = std::min(gap, std::abs(o.u - p1.u));
        pred[a] = {p1.u, std::max(0.5 * gap, floor), p1.j, p1.sym};
      }
    }
    struct Cand {
      double d;
      std::size_t a;
      std::size_t q;
    };
    std::vector<Cand> cands;
    std::vector<std::vector<Cand>> per_branch(active.size()), per_point(cur.size());
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::size_t q = 0; q < cur.size(); ++q) {
        const double d = std::abs(cur[q].u - pred[a].u);
        if (d <= pred[a].r) {
          cands.push_back({d, a, q});
          per_branch[a].push_back({d, a, q});
          per_point[q].push_back({d, a, q});
        }
      }
    auto by_d = [](const Cand& x, const Cand& y) {
      return x.d < y.d || (x.d == y.d && (x.a < y.a || (x.a == y.a && x.q < y.q)));
    };
    auto clear = [&](std::vector<Cand>& cs, auto label_ok) {
      if (cs.size() < 2) return true;
      std::sort(cs.begin(), cs.end(), by_d);
      if (cs[0].d <= ratio * cs[1].d) return true;
      int agree = 0;
      for (const auto& c : cs) agree += label_ok(c) ? 1 : 0;
      return agree == 1 && label_ok(cs[0]);
    };
    auto same_label = [&](const Cand& c) {
      return cur[c.q].j == pred[c.a].j && cur[c.q].sym == pred[c.a].sym;
    };
    bool ambiguous = false;
    for (auto& cs : per_branch) ambiguous |= !clear(cs, same_label);
    for (auto& cs : per_point) ambiguous |= !clear(cs, same_label);
    if (ambiguous) out.ambiguous.insert(k - 1);

    std::sort(cands.begin(), cands.end(), by_d);
    std::vector<int> taken_a(active.size(), 0), taken_q(cur.size(), 0);
    // Label agreement first, then anything within the radius.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cands) {
        if (taken_a[c.a] || taken_q[c.q]) continue;
        if (pass == 0 && !same_label(c)) continue;
        if (pass == 0) {
          // Only when no other free candidate is clearly nearer.
          bool nearer = false;
          for (const auto& o : per_branch[c.a])
            if (!taken_q[o.q] && o.d < ratio * c.d) nearer = true;
          if (nearer) continue;
        }
        taken_a[c.a] = taken_q[c.q] = 1;
        br[active[c.a]].pts.push_back({k, static_cast<int>(c.q)});
      }
    std::vector<int> next;
    for (std::size_t a = 0; a < active.size(); ++a)
      if (taken_a[a]) next.push_back(active[a]);
    for (std::size_t q = 0; q < cur.size(); ++q)
      if (!taken_q[q]) {
        br.push_back({{{k, static_cast<int>(q)}}});
        next.push_back(static_cast<int>(br.size()) - 1);
      }
    active = std::move(next);
  }
  return out;
}

std::set<int> event_intervals(const Linking& L, int n_levels) {
  std::set<int> ev;
  for (const auto& B : L.branches) {
    if (B.first() > 0) ev.insert(B.first() - 1);
    if (B.last() < n_levels - 1) ev.insert(B.last());
  }
  return ev;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::string fmt_b(double b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", b);
  return buf;
}

}  // namespace

DiagramContext::DiagramContext(const ProblemParams& params, const GammaOptions& opt)
    : params_(params),
      g0_(GammaCurve::build(Side::left, params, opt)),
      g1_(GammaCurve::build(Side::right, params, opt)) {
  b_star_ = critical_b_star(g0_.m0(), params.lambda, params.p);
  b_h_ = find_b_h_expanding(g0_, g1_, b_star_);
}

std::string turning_kind_name(TurningKind k) {
  return k == TurningKind::subcritical ? "subcritical" : "supercritical";
}

namespace {

Diagram sweep_curves(const GammaCurve& g0, const GammaCurve& g1, double b_star, double b_lo,
                     double b_hi, const SweepOptions& opt) {
  if (!(b_hi > b_lo) || !(b_lo > 0.0)) throw DomainError("sweep needs 0 < b_lo < b_hi");
  Diagram d;
  const double b_tol = opt.b_tol * b_star;
  std::vector<Level> lv;
  const int n = std::max(opt.n_b, 1);
  for (int i = 0; i <= n; ++i) {
    const double b = b_lo + (b_hi - b_lo) * i / n;
    lv.push_back(solve_level(b, g0, g1, opt.solver, d.notes));
  }
  Linking L;
  for (;;) {
    L = link_levels(lv, opt.ratio);
    std::set<int> todo = event_intervals(L, static_cast<int>(lv.size()));
    todo.insert(L.ambiguous.begin(), L.ambiguous.end());
    std::vector<double> mids;
    for (int k : todo)
      if (lv[k + 1].b - lv[k].b > b_tol) mids.push_back(0.5 * (lv[k].b + lv[k + 1].b));
    if (mids.empty()) break;
    if (static_cast<int>(lv.size() + mids.size()) > opt.max_levels) {
      d.notes.push_back("level budget exhausted before every event was resolved to b_tol");
      break;
    }
    for (double b : mids) lv.push_back(solve_level(b, g0, g1, opt.solver, d.notes));
    std::sort(lv.begin(), lv.end(), [](const Level& a, const Level& c) { return a.b < c.b; });
  }
  for (int k : L.ambiguous) d.ambiguous_b.push_back(0.5 * (lv[k].b + lv[k + 1].b));

  // Deterministic branch order: first level, then u at that level.
  auto& br = L.branches;
  std::sort(br.begin(), br.end(), [&](const Branch& a, const Branch& c) {
    if (a.first() != c.first()) return a.first() < c.first();
    return a.pts.front().second < c.pts.front().second;
  });
  const int nb = static_cast<int>(br.size());
  const int nl = static_cast<int>(lv.size());
  // u of branch at a level, if present.
  std::vector<std::map<int, int>> at(nb);
  for (int i = 0; i < nb; ++i)
    for (auto [k, q] : br[i].pts) at[i][k] = q;
  auto u_of = [&](int i, int k) { return lv[k].pts[at[i].at(k)].u; };
  auto sym_of = [&](int i, int k) { return lv[k].pts[at[i].at(k)].sym; };

  UnionFind uf(nb);
  for (int k = 0; k + 1 < nl; ++k) {
    const double bm = 0.5 * (lv[k].b + lv[k + 1].b);
    for (int side = 0; side < 2; ++side) {
      // side 0: branches ending at k; side 1: branches starting at k + 1.
      const int kk = side == 0 ? k : k + 1;
      std::vector<int> ends, cont;
      for (int i = 0; i < nb; ++i) {
        const bool has_k = at[i].count(k), has_k1 = at[i].count(k + 1);
        if (side == 0 && has_k && !has_k1) ends.push_back(i);
        if (side == 1 && has_k1 && !has_k) ends.push_back(i);
        if (has_k && has_k1) cont.push_back(i);
      }
      if (ends.empty()) continue;
      std::sort(ends.begin(), ends.end(), [&](int a, int c) { return u_of(a, kk) < u_of(c, kk); });
      std::vector<int> used(ends.size(), 0);
      // Pair neighbours, closest first.
      std::vector<std::pair<double, std::size_t>> gaps;
      for (std::size_t e = 0; e + 1 < ends.size(); ++e)
        gaps.push_back({u_of(ends[e + 1], kk) - u_of(ends[e], kk), e});
      std::sort(gaps.begin(), gaps.end());
      for (auto [g, e] : gaps) {
        if (used[e] || used[e + 1]) continue;
        const int a = ends[e], c = ends[e + 1];
        const double ua = u_of(a, kk), uc = u_of(c, kk);
        std::vector<int> between;
        for (int h : cont)
          if (u_of(h, kk) > ua && u_of(h, kk) < uc) between.push_back(h);
        if (between.empty()) {
          used[e] = used[e + 1] = 1;
          uf.unite(a, c);
          d.turning_points.push_back({std::min(a, c), bm, 0.5 * (ua + uc),
                                      side == 0 ? TurningKind::subcritical
                                                : TurningKind::supercritical});
        } else if (between.size() == 1) {
          used[e] = used[e + 1] = 1;
          const int h = between[0];
          uf.unite(a, c);
          uf.unite(a, h);
          Attachment at_;
          at_.b = bm;
          at_.u_alpha = u_of(h, kk);
          at_.host_branch = h;
          at_.branches = {std::min(a, c), std::max(a, c)};
          at_.ends_below = side == 0;
          at_.host_symmetric = sym_of(h, kk);
          at_.attached_symmetric = sym_of(a, kk) && sym_of(c, kk);
          d.attachments.push_back(at_);
        }
      }
      for (std::size_t e = 0; e < ends.size(); ++e) {
        if (used[e]) continue;
        const int a = ends[e];
        // A lone end joins the nearest continuing branch.
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int h : cont) {
          const double dd = std::abs(u_of(h, kk) - u_of(a, kk));
          if (dd < bd) bd = dd, best = h;
        }
        if (best >= 0) {
          uf.unite(a, best);
          Attachment at_;
          at_.b = bm;
          at_.u_alpha = u_of(best, kk);
          at_.host_branch = best;
          at_.branches = {a};
          at_.ends_below = side == 0;
          at_.host_symmetric = sym_of(best, kk);
          at_.attached_symmetric = sym_of(a, kk);
          d.attachments.push_back(at_);
          d.notes.push_back("branch " + std::to_string(a) + " ends alone near b = " + fmt_b(bm));
        } else {
          d.notes.push_back("branch " + std::to_string(a) + " ends without partner near b = " +
                            fmt_b(bm));
        }
      }
    }
  }

  std::map<int, int> comp_ids;
  for (int i = 0; i < nb; ++i) {
    const int r = uf.find(i);
    if (!comp_ids.count(r)) comp_ids.emplace(r, static_cast<int>(comp_ids.size()));
  }
  for (int i = 0; i < nb; ++i)
    for (auto [k, q] : br[i].pts) {
      const auto& p = lv[k].pts[q];
      DiagramPoint dp;
      dp.b = lv[k].b;
      dp.u_alpha = p.u;
      dp.u_one_minus_alpha = p.u1;
      dp.j = p.j;
      dp.x = p.u;
      dp.symmetric = p.sym;
      dp.branch_id = i;
      dp.component_id = comp_ids.at(uf.find(i));
      d.points.push_back(dp);
    }
  std::sort(d.points.begin(), d.points.end(), [](const DiagramPoint& a, const DiagramPoint& c) {
    return a.b < c.b || (a.b == c.b && a.u_alpha < c.u_alpha);
  });
  for (const auto& l : lv) {
    d.levels.push_back(l.b);
    d.suspect_solutions += l.suspects;
  }
  d.branches = nb;
  d.components = static_cast<int>(comp_ids.size());
  auto by_b = [](const auto& a, const auto& c) { return a.b < c.b; };
  std::stable_sort(d.turning_points.begin(), d.turning_points.end(), by_b);
  std::stable_sort(d.attachments.begin(), d.attachments.end(), by_b);
  return d;
}

}  // namespace

Diagram sweep(const DiagramContext& ctx, double b_lo, double b_hi, const SweepOptions& opt) {
  return sweep_curves(ctx.gamma0(), ctx.gamma1(), ctx.b_star(), b_lo, b_hi, opt);
}

void write_diagram_csv(std::ostream& os, const Diagram& d) {
  os << "b,u_alpha,j,branch_id,component_id\n";
  char buf[128];
  for (const auto& p : d.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%d,%d\n", p.b, p.u_alpha, p.j, p.branch_id,
                  p.component_id);
    os << buf;
  }
}

int components_in_box(const Diagram& d, double b_lo, double b_hi, double u_lo, double u_hi) {
  std::set<int> ids;
  for (const auto& p : d.points)
    if (p.b >= b_lo && p.b <= b_hi && p.u_alpha >= u_lo && p.u_alpha <= u_hi)
      ids.insert(p.component_id);
  return static_cast<int>(ids.size());
}

// ---------------------------------------------------------------------------
// Bifurcation points

namespace {

double g_value(const GammaCurve& g0, const GammaCurve& g1, int i, double b) {
  const TimeMaps tm(g0, g1, b);
  const double xt = tm.tangency0().x_t;
  double v = tm.thetas(xt).second - central_length(g0.params());
  if (i > 1) v += (i - 1) * tm.period_at(xt).value;
  return v;
}

double g_or_nan(const GammaCurve& g0, const GammaCurve& g1, int i, double b) {
  try {
    return g_value(g0, g1, i, b);
  } catch (const Error&) {
    return kNaN;
  }
}

void check_bifurcation_pre(const ProblemParams& p, int i, int sign) {
  if (!p.symmetric()) throw DomainError("bifurcation points are defined for nu = 1");
  if (i < 1) throw DomainError("loop index must be >= 1");
  if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
  if (!(p.lambda < lambda_threshold(i, p.p, p.alpha)))
    throw DomainError("lambda must lie below lambda_i for the i-th loop to exist");
}

}  // namespace

double bifurcation_function(const DiagramContext& ctx, int i, double b) {
  check_bifurcation_pre(ctx.params(), i, 1);
  return g_value(ctx.gamma0(), ctx.gamma1(), i, b);
}

BifurcationPoint find_bifurcation_point(const DiagramContext& ctx, int i, int sign,
                                        const BifurcationSearchOptions& opt) {
  check_bifurcation_pre(ctx.params(), i, sign);
  const double bs = ctx.b_star(), bh = ctx.b_h();
  const int n = std::max(opt.n_scan, 4);

  auto scan = [&](const GammaCurve& g0, const GammaCurve& g1, const std::vector<double>& bsamp,
                  std::vector<double>& roots) {
    std::vector<double> gs(bsamp.size());
    parallel_for(bsamp.size(), [&](std::size_t k) { gs[k] = g_or_nan(g0, g1, i, bsamp[k]); });
    auto G = [&](double b) { return g_value(g0, g1, i, b); };
    for (std::size_t k = 0; k + 1 < bsamp.size(); ++k) {
      const double a = gs[k], c = gs[k + 1];
      if (!std::isfinite(a) || !std::isfinite(c)) continue;
      const bool hit = sign > 0 ? (a < 0.0 && c >= 0.0) : (a > 0.0 && c <= 0.0);
      if (hit) roots.push_back(toms_root(G, bsamp[k], bsamp[k + 1], a, c));
    }
    return gs;
  };

  BifurcationPoint bp;
  bp.i = i;
  bp.sign = sign;
  const GammaCurve* g0 = &ctx.gamma0();
  const GammaCurve* g1 = &ctx.gamma1();
  std::optional<GammaCurve> e0, e1;
  bp.x_factor = GammaOptions{}.x_max_factor;

  if (sign > 0) {
    std::vector<double> w;
    for (int k = 1; k < n; ++k) w.push_back(static_cast<double>(k) / n);
    for (int m = 1; m <= 30; ++m) w.push_back(1.0 - std::ldexp(1.0, -m));
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    std::vector<double> bsamp;
    for (double x : w) bsamp.push_back(bs + (bh - bs) * x);
    scan(*g0, *g1, bsamp, bp.crossings);
  } else {
    // Log-spaced from b_min b* up to b*; the curves are widened while the
    // lower end of the scan falls outside their range.
    std::vector<double> bsamp;
    const double lo = std::log(opt.b_min), hi = std::log(1.0 - 1e-6);
    for (int k = 0; k <= 2 * n; ++k) bsamp.push_back(bs * std::exp(lo + (hi - lo) * k / (2 * n)));
    double factor = bp.x_factor;
    for (;;) {
      bp.crossings.clear();
      const auto gs = scan(*g0, *g1, bsamp, bp.crossings);
      const bool low_end_missing = !std::isfinite(gs.front());
      if (!bp.crossings.empty() || !low_end_missing || factor * 4.0 > opt.max_x_factor) break;
      factor *= 4.0;
      GammaOptions go;
      go.x_max_factor = factor;
      go.x_resolution = ctx.gamma0().m0() * factor / 3200.0;
      e0.emplace(GammaCurve::build(Side::left, ctx.params(), go));
      e1.emplace(GammaCurve::build(Side::right, ctx.params(), go));
      g0 = &*e0;
      g1 = &*e1;
      bp.x_factor = factor;
    }
  }
  std::sort(bp.crossings.begin(), bp.crossings.end());
  if (bp.crossings.empty())
    throw NotBracketedError(std::string("no ") + (sign > 0 ? "up" : "down") +
                            "-crossing of G found: the configuration does not support b_b^{" +
                            std::to_string(i) + "," + (sign > 0 ? "+" : "-") + "} in the scanned range");
  bp.b = sign > 0 ? bp.crossings.back() : bp.crossings.front();
  // Keep the checks inside the bracket of this crossing.
  double room = sign > 0 ? bh - bp.b : bp.b;
  for (double c : bp.crossings)
    if (c != bp.b) room = std::min(room, std::abs(c - bp.b));
  bp.delta = std::min(opt.delta_b * bs, 0.25 * room);
  bp.g_before = g_value(*g0, *g1, i, bp.b - bp.delta);
  bp.g_after = g_value(*g0, *g1, i, bp.b + bp.delta);
  const bool ok = sign > 0 ? (bp.g_before < 0.0 && bp.g_after > 0.0)
                           : (bp.g_before > 0.0 && bp.g_after < 0.0);
  if (!ok) throw InvariantViolation("crossing direction of G not confirmed at +-delta_b");
  return bp;
}

// ---------------------------------------------------------------------------
// Classification at nu = 1

std::string nu_one_type_name(NuOneType t) {
  switch (t) {
    case NuOneType::transcritical_nondegenerate_pitchfork:
      return "transcritical-nondegenerate-pitchfork";
    case NuOneType::transcritical_degenerate_pitchfork:
      return "transcritical-degenerate-pitchfork";
    case NuOneType::double_pitchfork:
      return "double-pitchfork";
    case NuOneType::undetermined:
      break;
  }
  return "undetermined";
}

namespace {

struct FdSample {
  double h, s1, s2, d1, d2, inc1;
  double noise, tol;
};

FdSample fd_at(const TimeMaps& tm, double xt, double h) {
  const auto [a1, a2] = tm.thetas(xt - h);
  const auto [c1, c2] = tm.thetas(xt);
  const auto [b1, b2] = tm.thetas(xt + h);
  FdSample f;
  f.h = h;
  f.s1 = (b1 - a1) / (2.0 * h);
  f.s2 = (b2 - a2) / (2.0 * h);
  f.d1 = (b1 - 2.0 * c1 + a1) / (h * h);
  f.d2 = (b2 - 2.0 * c2 + a2) / (h * h);
  f.inc1 = (b1 > c1 && c1 > a1) ? 1.0 : 0.0;
  // Quadrature and hit location are good to ~1e-10 relative.
  const double eps = 1e-10 * std::abs(c1);
  f.noise = 4.0 * eps / (h * h);
  f.tol = 0.05 * std::max(std::abs(f.d1), std::abs(f.d2)) * h + 2.0 * eps / h;
  return f;
}

NuOneType decide(const FdSample& f, std::string& why) {
  const double floor = 10.0 * f.noise;
  if (std::abs(f.d2) < floor) {
    why = "second difference of theta_2 below the noise floor";
    return NuOneType::undetermined;
  }
  if (std::abs(f.s2) > f.tol) {
    why = "theta_2 is not stationary at x_t";
    return NuOneType::undetermined;
  }
  if (f.s1 > f.tol && std::abs(f.s1 - f.s2) > f.tol) {
    why = "theta_1 increasing and transversal to theta_2";
    return NuOneType::transcritical_nondegenerate_pitchfork;
  }
  if (std::abs(f.s1 - f.s2) <= f.tol) {
    if (std::abs(f.d1) > floor && (f.d1 > 0.0) == (f.d2 > 0.0)) {
      why = "theta_1 stationary with the same even-order behaviour as theta_2";
      return NuOneType::double_pitchfork;
    }
    if (f.inc1 > 0.0) {
      why = "theta_1 increasing with slope within tolerance of theta_2's";
      return NuOneType::transcritical_degenerate_pitchfork;
    }
  }
  why = "no configuration matched";
  return NuOneType::undetermined;
}

}  // namespace

Nu1Classification classify_nu1_point(const DiagramContext& ctx, double b_point) {
  if (!ctx.params().symmetric()) throw DomainError("classification needs nu = 1");
  const TimeMaps tm(ctx.gamma0(), ctx.gamma1(), b_point);
  const auto& h0 = tm.homoclinic0();
  if (!h0) throw DomainError("classification needs b < b_h");
  Nu1Classification c;
  c.x_t = tm.tangency0().x_t;
  const double h = 1e-3 * std::min(c.x_t - h0->first, h0->second - c.x_t);
  const FdSample f = fd_at(tm, c.x_t, h);
  const FdSample g = fd_at(tm, c.x_t, 0.5 * h);
  std::string why_f, why_g;
  const NuOneType tf = decide(f, why_f);
  const NuOneType tg = decide(g, why_g);
  c.h = h;
  c.slope1 = f.s1;
  c.slope2 = f.s2;
  c.second1 = f.d1;
  c.second2 = f.d2;
  c.slope_tol = f.tol;
  c.noise = f.noise;
  c.stable = tf == tg;
  c.type = c.stable ? tf : NuOneType::undetermined;
  c.detail = c.stable ? why_f : "type changes when the step is halved (" + why_f + " / " + why_g + ")";
  return c;
}

// ---------------------------------------------------------------------------
// Imperfect bifurcation for nu > 1

std::string imperfect_case_name(ImperfectCase c) {
  switch (c) {
    case ImperfectCase::left:
      return "left";
    case ImperfectCase::right:
      return "right";
    case ImperfectCase::other:
      break;
  }
  return "other";
}

namespace {

std::vector<double> window_grid(double lo, double xt, double hi, int n) {
  const int half = std::max(n / 2, 2);
  std::vector<double> xs;
  for (int k = 0; k <= half; ++k) xs.push_back(lo + (xt - lo) * k / half);
  for (int k = 1; k <= half; ++k) xs.push_back(xt + (hi - xt) * k / half);
  return xs;
}

// Values of tau_{1,nu} and tau_{2,nu} along the window.
struct MapRow {
  std::vector<double> t1, t2;
};

MapRow map_row(const TimeMaps& tm, const std::vector<double>& xs) {
  MapRow r;
  for (double x : xs) {
    r.t1.push_back(tm.tau(x, 1).value);
    r.t2.push_back(tm.tau(x, 2).value);
  }
  return r;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t k = 0; k + 1 < v.size(); ++k)
    if (!(v[k + 1] > v[k])) return false;
  return true;
}

// Exactly one interior minimum: differences change sign once, - to +.
bool unique_interior_min(const std::vector<double>& v) {
  int changes = 0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    const bool down = v[k] < v[k - 1];
    const bool up = v[k + 1] > v[k];
    if (down && up) ++changes;
    else if (!down && !up) return false;
  }
  return changes == 1 && v[1] < v[0] && v[v.size() - 1] > v[v.size() - 2];
}

// Minimum over the window of tau_{which,nu}(., b) and its abscissa.
std::pair<double, double> window_min(const GammaCurve& g0, const GammaCurve& g1, double b,
                                     const std::vector<double>& xs, int which) {
  const TimeMaps tm(g0, g1, b);
  std::size_t best = 0;
  std::vector<double> v;
  for (double x : xs) v.push_back(tm.tau(x, which).value);
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] < v[best]) best = k;
  const double lo = xs[best > 0 ? best - 1 : 0], hi = xs[std::min(best + 1, xs.size() - 1)];
  auto f = [&](double x) { return tm.tau(x, which).value; };
  const auto r = boost::math::tools::brent_find_minima(f, lo, hi, 40);
  return {r.second, r.first};
}

// Root in b of tau_{which,nu}(x, b) = L near b0, with an expanding bracket.
double b_root(const GammaCurve& g0, const GammaCurve& g1, double x, int which, double b0,
              double step, double b_cap) {
  const double L = central_length(g0.params());
  auto f = [&](double b) { return TimeMaps(g0, g1, b).tau(x, which).value - L; };
  double lo = b0 - step, hi = std::min(b0 + step, b_cap);
  double flo = f(lo), fhi = f(hi);
  for (int k = 0; k < 30 && (flo > 0.0) == (fhi > 0.0); ++k) {
    step *= 2.0;
    if (flo > 0.0) lo -= step, flo = f(lo);
    else hi = std::min(hi + step, b_cap), fhi = f(hi);
  }
  if ((flo > 0.0) == (fhi > 0.0)) throw NotBracketedError("no b root of the perturbed map");
  return toms_root(f, lo, hi, flo, fhi, 44);
}

}  // namespace

ImperfectReport imperfect_analysis(const DiagramContext& ctx, double b_b,
                                   const Nu1Classification& cls, const ImperfectOptions& opt) {
  if (!ctx.params().symmetric()) throw DomainError("imperfect analysis starts from nu = 1");
  if (!(opt.nu_start > 1.0)) throw DomainError("imperfect analysis needs nu > 1");
  ImperfectReport rep;
  rep.b_b = b_b;
  rep.x_t = cls.x_t;
  const double L = central_length(ctx.params());
  const double bs = ctx.b_star();
  const auto& g0 = ctx.gamma0();
  const auto& g1 = ctx.gamma1();

  const bool a_case = cls.type == NuOneType::transcritical_nondegenerate_pitchfork;
  const bool c_case = cls.type == NuOneType::double_pitchfork;
  const double floor = 10.0 * cls.noise;
  if (!(std::abs(cls.second1) > floor && std::abs(cls.second2) > floor) ||
      cls.type == NuOneType::transcritical_degenerate_pitchfork) {
    rep.degenerate = true;
    rep.notes.push_back("degenerate-out-of-scope: a second x-derivative of theta vanishes at x_t");
    return rep;
  }
  if (!a_case && !c_case) {
    rep.notes.push_back("nu = 1 classification undetermined; imperfect analysis skipped");
    return rep;
  }

  // Window from the nu = 1 maps: half way to the nearest critical point of
  // theta_1 on either side, at most a quarter of the way to the homoclinic.
  const TimeMaps tm1(g0, g1, b_b);
  const auto h0 = *tm1.homoclinic0();
  const double xt = cls.x_t;
  double dl = 0.25 * (xt - h0.first), dr = 0.25 * (h0.second - xt);
  if (a_case) {
    const double xc = xt - cls.slope1 / cls.second1;
    if (xc < xt) dl = std::min(dl, 0.5 * (xt - xc));
    else dr = std::min(dr, 0.5 * (xc - xt));
  }
  rep.x_lo = xt - dl;
  rep.x_hi = xt + dr;
  const std::vector<double> xs = window_grid(rep.x_lo, xt, rep.x_hi, opt.n_x);

  // delta_b: half of the b-shift that moves theta_1 at the window edges
  // onto the level L (theta_2 in the double-pitchfork case).
  {
    const int which = a_case ? 1 : 2;
    const double hb = 1e-6 * bs;
    auto th = [&](double x, double b) {
      const TimeMaps t(g0, g1, b);
      const auto v = t.thetas(x);
      return which == 1 ? v.first : v.second;
    };
    double shift = std::numeric_limits<double>::infinity();
    for (double x : {rep.x_lo, rep.x_hi}) {
      const double db = (th(x, b_b + hb) - th(x, b_b - hb)) / (2.0 * hb);
      const double margin = std::abs(th(x, b_b) - L);
      if (db > 0.0) shift = std::min(shift, margin / db);
    }
    if (!std::isfinite(shift)) {
      rep.notes.push_back("maps do not grow with b at the window edges");
      return rep;
    }
    rep.delta_b = 0.5 * shift;
  }
  const double db = rep.delta_b;
  const std::vector<double> bchk{b_b - 2.0 * db, b_b - db, b_b, b_b + db};
  const MapRow ref = map_row(tm1, xs);

  std::optional<GammaCurve> g1nu;
  ImperfectCase seen = ImperfectCase::other;
  for (int k = 0; k <= opt.max_halvings; ++k) {
    const double nu = 1.0 + (opt.nu_start - 1.0) * std::ldexp(1.0, -k);
    rep.nus_tried.push_back(nu);
    GammaCurve g1k = GammaCurve::build(Side::right, ctx.params().with_nu(nu));
    std::vector<MapRow> rows;
    try {
      for (double b : bchk) rows.push_back(map_row(TimeMaps(g0, g1k, b), xs));
    } catch (const Error& e) {
      rep.notes.push_back("nu = " + fmt_b(nu) + ": " + e.what());
      continue;
    }
    const MapRow& at_bb = rows[2];
    bool ok = true;
    std::string why;
    auto need = [&](bool c, const char* msg) {
      if (!c && ok) why = msg;
      ok = ok && c;
    };
    // Chain tau_{1,nu} < tau_1 <= tau_2 < tau_{2,nu} at b_b.
    bool chain = true;
    for (std::size_t i = 0; i < xs.size(); ++i)
      chain = chain && at_bb.t1[i] < ref.t1[i] && ref.t1[i] <= ref.t2[i] && ref.t2[i] < at_bb.t2[i];
    need(chain, "perturbed maps not ordered around the nu = 1 maps");
    need(*std::min_element(at_bb.t2.begin(), at_bb.t2.end()) > L, "tau_2,nu reaches L at b_b");
    need(*std::min_element(rows[1].t2.begin(), rows[1].t2.end()) < L &&
             *std::min_element(rows[0].t2.begin(), rows[0].t2.end()) < L,
         "tau_2,nu stays above L on (b_b - 2 delta, b_b - delta)");
    need(unique_interior_min(rows[1].t2) && unique_interior_min(rows[2].t2),
         "tau_2,nu has no unique interior minimum");
    ImperfectCase cs = ImperfectCase::other;
    bool inc = true;
    for (const auto& r : rows) inc = inc && strictly_increasing(r.t1);
    if (inc) {
      cs = ImperfectCase::left;
      for (const auto& r : rows) need(r.t1.front() < L && r.t1.back() > L, "tau_1,nu root leaves the window");
    } else if (unique_interior_min(at_bb.t1)) {
      cs = ImperfectCase::right;
    }
    need(cs != ImperfectCase::other, "tau_1,nu neither increasing nor with a single minimum");
    if (ok) {
      rep.nu = nu;
      seen = cs;
      g1nu.emplace(std::move(g1k));
      break;
    }
    rep.notes.push_back("nu = " + fmt_b(nu) + " rejected: " + why);
  }
  if (!g1nu) {
    rep.notes.push_back("no nu in the halving sequence shows the imperfect structure");
    return rep;
  }
  const ImperfectCase expected = a_case ? ImperfectCase::left : ImperfectCase::right;
  rep.shape = seen == expected ? seen : ImperfectCase::other;
  if (seen != expected) rep.notes.push_back("perturbed maps disagree with the nu = 1 classification");

  // Turning point of the tau_{2,nu} branch: its window minimum meets L.
  auto m2 = [&](double b) { return window_min(g0, *g1nu, b, xs, 2).first - L; };
  const double lo = b_b - db, f_lo = m2(lo), f_hi = m2(b_b);
  rep.turning_b = toms_root(m2, lo, b_b, f_lo, f_hi, 44);
  rep.turning_bs.push_back(rep.turning_b);
  rep.subcritical = rep.turning_b < b_b && f_lo < 0.0;
  if (seen == ImperfectCase::right) {
    auto m1 = [&](double b) { return window_min(g0, *g1nu, b, xs, 1).first - L; };
    double hi = b_b + db;
    double f1 = m1(hi);
    for (int k = 0; k < 20 && f1 < 0.0; ++k) hi += db, f1 = m1(hi);
    const double f0 = m1(b_b);
    if (f0 < 0.0 && f1 > 0.0) rep.turning_bs.push_back(toms_root(m1, b_b, hi, f0, f1, 44));
    else rep.notes.push_back("second turning point of the right case not bracketed");
  }

  // Sweep of the window at the accepted nu.
  {
    SweepOptions so = opt.sweep;
    so.b_tol = std::min(so.b_tol, db / (64.0 * bs));
    so.n_b = std::max(so.n_b, 12);
    const Diagram d = sweep_curves(g0, *g1nu, bs, b_b - 2.0 * db, b_b + db, so);
    rep.components = components_in_box(d, b_b - 2.0 * db, b_b + db, rep.x_lo, rep.x_hi);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : d.turning_points)
      if (t.u_alpha >= rep.x_lo && t.u_alpha <= rep.x_hi &&
          std::abs(t.b - rep.turning_b) < std::abs(best - rep.turning_b))
        best = t.b;
    if (std::isfinite(best)) rep.sweep_turning_b = best;
    rep.separated = rep.components == 2;
    for (const auto& n : d.notes) rep.notes.push_back("window sweep: " + n);
  }

  // Gap between the two local branches at equal u(alpha): min over the
  // window of b_1(x) - b_2(x), relative to b*.
  for (double nu : opt.gap_nus) {
    const GammaCurve g1k = GammaCurve::build(Side::right, ctx.params().with_nu(nu));
    const double cap = ctx.b_h() * (1.0 - 1e-9);
    auto sep = [&](double x) {
      const double b2 = b_root(g0, g1k, x, 2, b_b, db, cap);
      const double b1 = b_root(g0, g1k, x, 1, b_b, db, cap);
      return (b1 - b2) / bs;
    };
    GapSample s;
    s.nu = nu;
    try {
      const auto r = boost::math::tools::brent_find_minima(sep, rep.x_lo, rep.x_hi, 30);
      s.gap = r.second;
      auto m = [&](double b) { return window_min(g0, g1k, b, xs, 2).first - L; };
      double lo2 = b_b - db, f2 = m(lo2);
      for (int k = 0; k < 30 && f2 > 0.0; ++k) lo2 -= db * std::ldexp(1.0, k), f2 = m(lo2);
      s.b_T = toms_root(m, lo2, b_b, f2, m(b_b), 44);
    } catch (const Error& e) {
      s.gap = kNaN;
      rep.notes.push_back("gap at nu = " + fmt_b(nu) + ": " + e.what());
    }
    rep.gaps.push_back(s);
  }
  rep.gap_monotone = rep.gaps.size() >= 2;
  for (std::size_t k = 0; k < rep.gaps.size(); ++k) {
    if (!(rep.gaps[k].gap > 0.0)) rep.gap_monotone = false;
    if (k > 0 && !(rep.gaps[k].gap < rep.gaps[k - 1].gap)) rep.gap_monotone = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Reflection t -> 1 - t

ReflectionReport reflection_check(const ProblemParams& params, const std::vector<double>& bs,
                                  const OracleOptions& opt) {
  if (!(params.nu < 1.0)) throw DomainError("reflection check needs nu < 1");
  ProblemParams refl = params;
  refl.c = params.nu * params.c;
  refl.nu = 1.0 / params.nu;
  const GammaCurve d0 = GammaCurve::build(Side::left, params);
  const GammaCurve r0 = GammaCurve::build(Side::left, refl);
  const GammaCurve r1 = GammaCurve::build(Side::right, refl);
  const auto wd = oracle_window(d0);
  const auto wr = oracle_window(r0);
  ReflectionReport rep;
  rep.ok = true;
  for (double b : bs) {
    auto direct = shooting_oracle(params.with_b(b), wd.first, wd.second, opt);
    auto mirror = shooting_oracle(refl.with_b(b), wr.first, wr.second, opt);
    rep.bs.push_back(b);
    rep.counts_direct.push_back(direct.size());
    rep.counts_reflected.push_back(mirror.size());
    const auto by_alpha = [](const BvpSolution& a, const BvpSolution& c) {
      return a.x_alpha < c.x_alpha;
    };
    // The time-map solver on the reflected problem must agree as well.
    auto solved = solve_at(b, r0, r1);
    std::erase_if(solved, [](const BvpSolution& s) { return s.suspect; });
    rep.counts_solver.push_back(solved.size());
    if (solved.size() != mirror.size()) {
      rep.ok = false;
      rep.notes.push_back("time-map solver count differs from the oracle at b = " + fmt_b(b));
    } else {
      std::sort(solved.begin(), solved.end(), by_alpha);
      auto ref = mirror;
      std::sort(ref.begin(), ref.end(), by_alpha);
      for (std::size_t k = 0; k < solved.size(); ++k)
        rep.max_solver_mismatch = std::max(
            rep.max_solver_mismatch, std::abs(solved[k].x_alpha - ref[k].x_alpha));
    }
    if (direct.size() != mirror.size()) {
      rep.ok = false;
      rep.notes.push_back("count mismatch at b = " + fmt_b(b));
      continue;
    }
    std::sort(direct.begin(), direct.end(),
              [](const BvpSolution& a, const BvpSolution& c) { return a.x_alpha < c.x_alpha; });
    std::sort(mirror.begin(), mirror.end(), [](const BvpSolution& a, const BvpSolution& c) {
      return a.x_one_minus_alpha < c.x_one_minus_alpha;
    });
    for (std::size_t k = 0; k < direct.size(); ++k) {
      const double e = std::max(std::abs(direct[k].x_alpha - mirror[k].x_one_minus_alpha),
                                std::abs(direct[k].x_one_minus_alpha - mirror[k].x_alpha));
      rep.max_mismatch = std::max(rep.max_mismatch, e);
    }
  }
  if (!(rep.max_solver_mismatch <= 1e-6)) {
    rep.ok = false;
    rep.notes.push_back("time-map solver and oracle differ by more than 1e-6 on the reflected problem");
  }
  if (!(rep.max_mismatch <= 1e-6)) {
    rep.ok = false;
    rep.notes.push_back("u(alpha) / u(1 - alpha) mismatch above 1e-6");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Report

void write_report_json(std::ostream& os, const BifurcationReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["b_star"] = r.b_star;
  j["b_h"] = r.b_h;
  j["b_points"] = ordered_json::array();
  for (const auto& p : r.b_points)
    j["b_points"].push_back({{"i", p.i}, {"sign", p.sign > 0 ? "+" : "-"}, {"b", p.b}});
  j["turning_points"] = ordered_json::array();
  for (const auto& t : r.turning_points)
    j["turning_points"].push_back(
        {{"branch_id", t.branch_id}, {"b", t.b}, {"kind", turning_kind_name(t.kind)}});
  j["nu_one_type"] = nu_one_type_name(r.nu_one_type);
  j["components"] = r.components;
  if (r.imperfect) {
    const auto& im = *r.imperfect;
    ordered_json g = ordered_json::array();
    for (const auto& s : im.gaps) g.push_back({{"nu", s.nu}, {"gap", s.gap}, {"b_T", s.b_T}});
    j["imperfect"] = {{"turning_b", im.turning_b},
                      {"separated", im.separated},
                      {"figure6_case", imperfect_case_name(im.shape)},
                      {"nu", im.nu},
                      {"degenerate", im.degenerate},
                      {"turning_bs", im.turning_bs},
                      {"components", im.components},
                      {"window", {im.x_lo, im.x_hi}},
                      {"delta_b", im.delta_b},
                      {"gaps", g},
                      {"gap_monotone", im.gap_monotone},
                      {"notes", im.notes}};
  } else {
    j["imperfect"] = nullptr;
  }
  j["notes"] = r.notes;
  os << j.dump(2) << "\n";
}

}  // namespace indefbif
