#include "indefbif/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <nlohmann/json.hpp>

#include "indefbif/error.hpp"
#include "indefbif/parallel.hpp"

namespace indefbif {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Evaluator = std::function<std::vector<double>(double)>;

struct Root {
  double x;
  std::size_t branch;
};

// Grid clustered double-exponentially at both ends of [a, c]; the maps blow
// up logarithmically at homoclinic ends and change character at breakpoints.
std::vector<double> clustered_grid(double a, double c, int n) {
  std::vector<double> xs(n);
  const double te = 3.0;
  for (int i = 0; i < n; ++i) {
    const double t = -te + 2.0 * te * (i + 0.5) / n;
    const double w = 0.5 * (1.0 + std::tanh(0.5 * M_PI * std::sinh(t)));
    xs[i] = a + (c - a) * w;
  }
  return xs;
}

template <class F>
double toms_root(F&& f, double lo, double hi, double flo, double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 100;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                             boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

// Roots of every branch value minus L on [a, c].
std::vector<Root> scan_segment(double a, double c, int n, const Evaluator& eval, double L,
                               double map_residual) {
  if (!(c > a)) return {};
  const std::vector<double> xs = clustered_grid(a, c, n);
  std::vector<std::vector<double>> vals(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { vals[i] = eval(xs[i]); });
  std::size_t nb = 0;
  for (const auto& v : vals) nb = std::max(nb, v.size());
  for (auto& v : vals) v.resize(nb, kNaN);

  struct Bracket {
    double lo, hi, glo, ghi;
    std::size_t k;
  };
  std::vector<Bracket> brackets;
  auto value = [&](double x, std::size_t k) {
    try {
      const auto v = eval(x);
      return k < v.size() ? v[k] - L : kNaN;
    } catch (const Error&) {
      return kNaN;
    }
  };
  for (std::size_t k = 0; k < nb; ++k) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double g0 = vals[i][k] - L, g1 = vals[i + 1][k] - L;
      if (std::isfinite(g0) && std::isfinite(g1) && ((g0 < 0.0) != (g1 < 0.0) || g1 == 0.0))
        brackets.push_back({xs[i], xs[i + 1], g0, g1, k});
    }
    // a dip of the map toward L between samples may hide a pair of roots
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      const double gl = vals[i - 1][k] - L, gm = vals[i][k] - L, gr = vals[i + 1][k] - L;
      if (!std::isfinite(gl) || !std::isfinite(gm) || !std::isfinite(gr)) continue;
      const bool dip = gm > 0.0 && gm <= gl && gm <= gr;
      const bool bump = gm < 0.0 && gm >= gl && gm >= gr;
      if (!dip && !bump) continue;
      const double spread = std::max(std::abs(gl - gm), std::abs(gr - gm));
      if (std::abs(gm) > 4.0 * spread) continue;
      const double sgn = dip ? 1.0 : -1.0;
      auto f = [&](double x) {
        const double g = value(x, k);
        return std::isfinite(g) ? sgn * g : std::numeric_limits<double>::max();
      };
      const auto [xm, fm] = boost::math::tools::brent_find_minima(f, xs[i - 1], xs[i + 1], 40);
      if (fm < 0.0) {
        brackets.push_back({xs[i - 1], xm, gl, sgn * fm, k});
        brackets.push_back({xm, xs[i + 1], sgn * fm, gr, k});
      }
    }
  }

  std::vector<Root> roots(brackets.size(), {kNaN, 0});
  parallel_for(brackets.size(), [&](std::size_t r) {
    const Bracket& br = brackets[r];
    try {
      auto g = [&](double x) {
        const double v = value(x, br.k);
        if (!std::isfinite(v)) throw NotReachableError("map undefined inside a bracket");
        return v;
      };
      const double x = toms_root(g, br.lo, br.hi, br.glo, br.ghi);
      if (std::abs(g(x)) <= map_residual) roots[r] = {x, br.k};
    } catch (const Error&) {
    }
  });
  std::erase_if(roots, [](const Root& r) { return std::isnan(r.x); });
  return roots;
}

std::vector<double> sorted_unique(std::vector<double> v, double a, double c) {
  std::erase_if(v, [&](double x) { return !(x > a && x < c); });
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(),
                      [&](double p, double q) { return std::abs(p - q) <= 1e-14 * (c - a); }),
          v.end());
  v.insert(v.begin(), a);
  v.push_back(c);
  return v;
}

// Abscissas on Gamma_0 where the tau maps can jump or lose crossings.
std::vector<double> tau_breakpoints(const TimeMaps& tm) {
  const GammaCurve& g0 = tm.gamma0();
  const GammaCurve& g1 = tm.gamma1();
  const Well& w = tm.well();
  std::vector<double> levels;
  for (const auto& e : tm.extrema1()) levels.push_back(e.E);
  for (const auto& s : {g1.samples().front(), g1.samples().back()})
    levels.push_back(s.y * s.y + w.phi(s.x));
  std::vector<double> bps;
  for (double E : levels)
    for (const auto& h : g0.level_hits(E, tm.b(), tm.extrema0())) bps.push_back(h.x);
  // the start point lies on Gamma_1 where the curves cross
  const double hi = std::min(g0.x_max(), g1.x_max());
  const double lo = std::max(g0.x_min(), g1.x_min());
  auto diff = [&](double x) { return g0.y(x) - g1.y(x); };
  double xp = lo, dp = diff(lo);
  for (const auto& s : g0.samples()) {
    if (s.x <= lo || s.x >= hi) continue;
    const double d = diff(s.x);
    if ((d < 0.0) != (dp < 0.0)) bps.push_back(toms_root(diff, xp, s.x, dp, d));
    xp = s.x;
    dp = d;
  }
  bps.push_back(tm.tangency0().x_t);
  return bps;
}

BvpSolution solution_from_trajectory(const Trajectory& tr, double slope0, const ProblemParams& pr,
                                     int profile_points) {
  BvpSolution s;
  s.slope0 = slope0;
  s.min_u = tr.min_u();
  if (tr.status != TrajectoryStatus::completed) {
    s.suspect = true;
    s.reason = "trajectory left the positive region";
    s.residual = std::numeric_limits<double>::infinity();
    return s;
  }
  s.x_alpha = tr.at(pr.alpha).u;
  s.x_one_minus_alpha = tr.at(1.0 - pr.alpha).u;
  s.residual = std::abs(tr.back().pt.u - pr.M);
  const int n = std::max(profile_points, 2);
  s.profile.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    const PhasePoint p = tr.at(t);
    s.profile.push_back({t, p.u, p.v});
  }
  return s;
}

double shoot_residual(double s, const ProblemParams& pr, const OdeSettings& ode) {
  const Trajectory tr = integrate_full(s, pr, ode, false);
  return tr.status == TrajectoryStatus::completed ? tr.back().pt.u - pr.M : kNaN;
}

// Sign change of u(1; s) - M within a few 1e-10 of s0, bisected to the last
// representable midpoint.
std::optional<double> polish_slope(double s0, const ProblemParams& pr, const OdeSettings& ode,
                                   double accept) {
  const double f0 = shoot_residual(s0, pr, ode);
  if (!std::isfinite(f0)) return std::nullopt;
  if (std::abs(f0) <= accept) return s0;
  const double scale = std::max(1.0, std::abs(s0));
  for (double d = 1e-15 * scale; d <= 1e-9 * scale; d *= 2.0) {
    for (double sgn : {-1.0, 1.0}) {
      const double s1 = s0 + sgn * d;
      const double f1 = shoot_residual(s1, pr, ode);
      if (!std::isfinite(f1) || (f1 < 0.0) == (f0 < 0.0)) continue;
      double a = s0, c = s1, fa = f0;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + c);
        if (m == a || m == c) break;
        const double fm = shoot_residual(m, pr, ode);
        if (!std::isfinite(fm)) break;
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          c = m;
        }
      }
      const double fc = shoot_residual(c, pr, ode);
      return std::abs(fc) < std::abs(fa) ? c : a;
    }
  }
  return std::nullopt;
}

}  // namespace

int max_crossing_index(const ProblemParams& params) {
  const double Ts = small_oscillation_period(params.lambda, params.p);
  return 2 * static_cast<int>(std::floor(params.central_length() / Ts)) + 2;
}

BvpSolution reconstruct(double x, int j, const TimeMaps& tm, const SolverOptions& opt) {
  // The right boundary curve carries nu; Gamma_0 may come from any nu.
  const ProblemParams pr =
      tm.gamma0().params().with_b(tm.b()).with_nu(tm.gamma1().params().nu);
  const CurvePoint p = tm.gamma0().shoot_at(x);
  // Near the homoclinic u(1) moves by ~1e5 per unit of slope, so the map
  // root (good to ~1e-10 in x) is refined to the nearest shooting root.
  double slope = p.slope0;
  if (const auto polished = polish_slope(p.slope0, pr, opt.ode, 0.1 * opt.residual_tol))
    slope = *polished;
  const Trajectory tr = integrate_full(slope, pr, opt.ode);
  BvpSolution s = solution_from_trajectory(tr, slope, pr, opt.profile_points);
  s.j = j;
  if (s.suspect) return s;
  // Stitch check on the map root itself, met in the middle of the central
  // interval: forward from the state on Gamma_0 and backward (time reversal
  // v -> -v) from the predicted crossing on Gamma_{1,nu}. Halving the span
  // keeps the error growth near the homoclinic at ~exp(sqrt(-lambda) L / 2).
  s.stitch_error = std::numeric_limits<double>::infinity();
  try {
    const GammaCurve& g1 = tm.gamma1();
    double xi = g1.m0();  // j = 0: the centre of the well
    if (j >= 1) {
      const PhaseSlice sl = tm.slice(x);
      if (sl.hits_per_turn() == 0) throw NotReachableError("no crossing");
      xi = sl.hit_abscissas[(j - 1) % sl.hits_per_turn()];
    }
    const CurvePoint q = g1.shoot_at(xi);
    const double half = 0.5 * pr.central_length();
    const Trajectory fwd = integrate_central({p.x, p.y}, pr.b, pr.lambda, pr.p, half, {}, opt.ode);
    const Trajectory bwd =
        integrate_central({q.x, -q.y}, pr.b, pr.lambda, pr.p, half, {}, opt.ode);
    if (fwd.status == TrajectoryStatus::completed && bwd.status == TrajectoryStatus::completed) {
      const PhasePoint a = fwd.back().pt, c = bwd.back().pt;
      s.stitch_error = std::max({std::abs(p.x - x), std::abs(a.u - c.u), std::abs(a.v + c.v)});
    }
  } catch (const Error&) {
  }
  if (s.residual > opt.residual_tol * std::max(1.0, pr.M)) {
    s.suspect = true;
    s.reason = "boundary residual above tolerance";
  } else if (s.stitch_error > opt.stitch_tol) {
    s.suspect = true;
    s.reason = "state at 1-alpha off the right boundary curve";
  } else if (!(s.min_u > 0.0)) {
    s.suspect = true;
    s.reason = "profile not positive";
  } else if (std::abs(s.x_alpha - x) > opt.polish_tol * std::max(1.0, x)) {
    s.suspect = true;
    s.reason = "shooting root far from the time-map root";
  }
  return s;
}

std::vector<BvpSolution> solve_at(const TimeMaps& tm, const SolverOptions& opt) {
  const ProblemParams& pr = tm.gamma0().params();
  const double L = pr.central_length();
  const int j_max = max_crossing_index(pr);
  const GammaCurve& g0 = tm.gamma0();

  struct Candidate {
    double x;
    int j;
    int multiplicity;
    bool symmetric;
  };
  std::vector<Candidate> cands;

  auto tau_eval = [&](double x) {
    std::vector<double> v(j_max, kNaN);
    try {
      const PhaseSlice s = tm.slice(x);
      for (int j = 1; j <= j_max; ++j) {
        try {
          v[j - 1] = s.tau(j);
        } catch (const NotReachableError&) {
        }
      }
    } catch (const Error&) {
    }
    return v;
  };

  const double lo = g0.x_min(), hi = g0.x_max();
  const auto& h0 = tm.homoclinic0();
  const bool theta_route = opt.use_theta && tm.symmetric() && h0.has_value();

  std::vector<double> bps = tau_breakpoints(tm);
  if (h0) {
    bps.push_back(h0->first);
    bps.push_back(h0->second);
  }
  const std::vector<double> cuts = sorted_unique(bps, lo, hi);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], c = cuts[s + 1];
    const bool inside = h0 && a >= h0->first && c <= h0->second;
    if (theta_route && inside) continue;
    for (const Root& r : scan_segment(a, c, opt.grid_per_segment, tau_eval, L, opt.map_residual))
      cands.push_back({r.x, static_cast<int>(r.branch) + 1, 1, false});
  }

  if (theta_route) {
    const int m_max = j_max / 2;
    auto theta_eval = [&](double x) {
      std::vector<double> v(2 * (m_max + 1), kNaN);
      try {
        const auto [t1, t2] = tm.thetas(x);
        const double T = tm.slice(x).period;
        for (int m = 0; m <= m_max; ++m) {
          v[2 * m] = t1 + m * T;
          v[2 * m + 1] = t2 + m * T;
        }
      } catch (const Error&) {
      }
      return v;
    };
    std::vector<double> tb{tm.tangency0().x_t, g0.m0()};
    const std::vector<double> tcuts = sorted_unique(tb, h0->first, h0->second);
    for (std::size_t s = 0; s + 1 < tcuts.size(); ++s) {
      for (const Root& r :
           scan_segment(tcuts[s], tcuts[s + 1], opt.grid_per_segment, theta_eval, L,
                        opt.map_residual)) {
        const auto [t1, t2] = tm.thetas(r.x);
        const int m = static_cast<int>(r.branch / 2);
        const bool first = r.branch % 2 == 0;
        const double mine = first ? t1 : t2, other = first ? t2 : t1;
        const bool tangent = std::abs(t1 - t2) <= 1e-9 * L;
        const int j = 2 * m + 1 + (mine > other && !tangent ? 1 : 0);
        cands.push_back({r.x, j, tangent ? 2 : 1, first});
      }
    }
  }

  // The centre of the well is no orbit of the maps; it is a solution (constant
  // on the central interval) when both curves cross the u axis there.
  const double Om = tm.well().center();
  if (std::abs(g0.m0() - Om) <= 1e-9 * Om && std::abs(tm.gamma1().m0() - Om) <= 1e-9 * Om)
    cands.push_back({g0.m0(), 0, 1, true});

  std::vector<BvpSolution> sols(cands.size());
  parallel_for(cands.size(), [&](std::size_t i) {
    sols[i] = reconstruct(cands[i].x, cands[i].j, tm, opt);
    sols[i].multiplicity = cands[i].multiplicity;
    sols[i].symmetric_candidate = cands[i].symmetric;
  });

  // canonical order, then merge duplicates reached through several branches
  std::sort(sols.begin(), sols.end(), [](const BvpSolution& a, const BvpSolution& b) {
    return a.slope0 < b.slope0;
  });
  std::vector<BvpSolution> out;
  for (auto& s : sols) {
    if (!out.empty() &&
        std::abs(out.back().slope0 - s.slope0) <= 1e-9 * std::max(1.0, std::abs(s.slope0))) {
      BvpSolution& keep = out.back();
      keep.multiplicity = std::max(keep.multiplicity, s.multiplicity);
      keep.symmetric_candidate = keep.symmetric_candidate || s.symmetric_candidate;
      if (s.residual < keep.residual && !s.suspect) {
        s.multiplicity = keep.multiplicity;
        s.symmetric_candidate = keep.symmetric_candidate;
        keep = std::move(s);
      }
      continue;
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const BvpSolution& a, const BvpSolution& b) {
    return a.x_alpha < b.x_alpha;
  });
  return out;
}

std::vector<BvpSolution> solve_at(double b, const GammaCurve& gamma0, const GammaCurve& gamma1,
                                  const SolverOptions& opt) {
  const TimeMaps tm(gamma0, gamma1, b);
  return solve_at(tm, opt);
}

std::pair<double, double> oracle_window(const GammaCurve& gamma0) {
  const double a = gamma0.samples().front().s, c = gamma0.samples().back().s;
  const double pad = 0.1 * (c - a);
  return {a - pad, c + pad};
}

std::vector<BvpSolution> shooting_oracle(const ProblemParams& params, double s_lo, double s_hi,
                                         const OracleOptions& opt) {
  params.validate();
  const int n = std::max(opt.n_scan, 3);
  auto F = [&](double s) {
    const Trajectory tr = integrate_full(s, params, opt.ode, false);
    if (tr.status != TrajectoryStatus::completed) return kNaN;
    return tr.back().pt.u - params.M;
  };
  std::vector<double> ss(n), fs(n);
  for (int i = 0; i < n; ++i) ss[i] = s_lo + (s_hi - s_lo) * i / (n - 1);
  parallel_for(n, [&](std::size_t i) { fs[i] = F(ss[i]); });

  // Brackets as (s_a, s_b, F_a): grid sign changes, dips of |F| that hide a
  // pair of roots, and roots packed against edges of the positive slope set.
  struct SBracket {
    double a, c, fa;
  };
  using Grid = std::vector<double>;
  using Out = std::vector<SBracket>;
  auto sign_changes = [](const Grid& xs, const Grid& ys, Out& out) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (!std::isfinite(ys[i]) || !std::isfinite(ys[i + 1])) continue;
      if ((ys[i] < 0.0) != (ys[i + 1] < 0.0) || ys[i + 1] == 0.0)
        out.push_back({xs[i], xs[i + 1], ys[i]});
    }
  };
  auto is_dip = [](const Grid& ys, std::size_t i) {
    const double fl = ys[i - 1], fm = ys[i], fr = ys[i + 1];
    if (!std::isfinite(fl) || !std::isfinite(fm) || !std::isfinite(fr)) return false;
    if ((fl < 0.0) != (fm < 0.0) || (fr < 0.0) != (fm < 0.0)) return false;
    const double sgn = fm < 0.0 ? -1.0 : 1.0;
    return sgn * fm <= sgn * fl && sgn * fm <= sgn * fr;
  };
  auto dip = [&](const Grid& xs, const Grid& ys, std::size_t i, Out& out) {
    const double sgn = ys[i] < 0.0 ? -1.0 : 1.0;
    auto g = [&](double s) {
      const double f = F(s);
      return std::isfinite(f) ? sgn * f : std::numeric_limits<double>::max();
    };
    const auto [sm, gm] = boost::math::tools::brent_find_minima(g, xs[i - 1], xs[i + 1], 50);
    if (gm < 0.0) {
      out.push_back({xs[i - 1], sm, ys[i - 1]});
      out.push_back({sm, xs[i + 1], sgn * gm});
    }
  };
  // Cells straddling an edge of the positive slope set are rescanned on finer
  // grids; at the finest level the edge is bisected and approached
  // geometrically, since F can turn within a tiny fraction of a cell there.
  std::function<void(const Grid&, const Grid&, std::size_t, int, Out&)> edge_cell;
  edge_cell = [&](const Grid& xs, const Grid& ys, std::size_t i, int depth, Out& out) {
    if (depth > 0) {
      // the straddling cell and its neighbour on the positive side
      const bool left_pos = std::isfinite(ys[i]);
      const std::size_t lo = left_pos && i > 0 ? i - 1 : i;
      const std::size_t hi = !left_pos && i + 2 < xs.size() ? i + 2 : i + 1;
      const int kSub = 64 * static_cast<int>(hi - lo);
      Grid sx(kSub + 1), sy(kSub + 1);
      for (int k = 0; k <= kSub; ++k) {
        sx[k] = xs[lo] + (xs[hi] - xs[lo]) * k / kSub;
        sy[k] = k == 0 ? ys[lo] : k == kSub ? ys[hi] : F(sx[k]);
      }
      sign_changes(sx, sy, out);
      for (int k = 1; k < kSub; ++k)
        if (is_dip(sy, k)) dip(sx, sy, k, out);
      for (int k = 0; k < kSub; ++k)
        if (std::isfinite(sy[k]) != std::isfinite(sy[k + 1])) edge_cell(sx, sy, k, depth - 1, out);
      return;
    }
    const std::size_t pos = std::isfinite(ys[i]) ? i : i + 1;
    double in = xs[pos], outside = xs[pos == i ? i + 1 : i];
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (in + outside);
      if (mid == in || mid == outside) break;
      (std::isfinite(F(mid)) ? in : outside) = mid;
    }
    const double h = xs[pos] - in;
    double sp = xs[pos], fp = ys[pos];
    for (int q = 1; q <= 60; ++q) {
      const double sq = in + h * std::ldexp(1.0, -q);
      if (sq == in) break;
      const double f = F(sq);
      if (!std::isfinite(f)) break;
      if ((f < 0.0) != (fp < 0.0)) out.push_back({sq, sp, f});
      sp = sq;
      fp = f;
    }
  };

  Out brackets;
  sign_changes(ss, fs, brackets);
  for (const auto& b : brackets)
    if (b.a == ss.front() || b.c == ss.back())
      throw ResolutionError("oracle root at the edge of the slope window");
  std::vector<std::size_t> dips, edges;
  for (int i = 1; i + 1 < n; ++i)
    if (is_dip(fs, i)) dips.push_back(i);
  for (int i = 0; i + 1 < n; ++i)
    if (std::isfinite(fs[i]) != std::isfinite(fs[i + 1])) edges.push_back(i);
  std::vector<Out> extra(dips.size() + edges.size());
  parallel_for(extra.size(), [&](std::size_t k) {
    if (k < dips.size()) {
      dip(ss, fs, dips[k], extra[k]);
    } else {
      edge_cell(ss, fs, edges[k - dips.size()], 2, extra[k]);
    }
  });
  for (const auto& e : extra) brackets.insert(brackets.end(), e.begin(), e.end());

  std::vector<BvpSolution> sols(brackets.size());
  parallel_for(brackets.size(), [&](std::size_t k) {
    double a = brackets[k].a, c = brackets[k].c, fa = brackets[k].fa;
    // plain bisection to the last representable midpoint: F is only
    // piecewise smooth near the positivity limit
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + c);
      if (m == a || m == c) break;
      const double fm = F(m);
      if (!std::isfinite(fm)) break;
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        c = m;
      }
    }
    const double s = 0.5 * (a + c);
    sols[k] = solution_from_trajectory(integrate_full(s, params, opt.ode), s, params,
                                       opt.profile_points);
  });
  std::erase_if(sols, [](const BvpSolution& s) { return s.suspect; });
  // edge refinement revisits grid cells next to the edges
  std::sort(sols.begin(), sols.end(), [](const BvpSolution& a, const BvpSolution& b) {
    return a.slope0 < b.slope0;
  });
  sols.erase(std::unique(sols.begin(), sols.end(),
                         [](const BvpSolution& a, const BvpSolution& b) {
                           return std::abs(a.slope0 - b.slope0) <=
                                  1e-10 * std::max(1.0, std::abs(a.slope0));
                         }),
             sols.end());
  std::sort(sols.begin(), sols.end(), [](const BvpSolution& a, const BvpSolution& b) {
    return a.x_alpha < b.x_alpha;
  });
  return sols;
}

void write_solutions_json(std::ostream& os, const std::vector<BvpSolution>& sols,
                          int profile_stride) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : sols) {
    nlohmann::json o;
    o["x_alpha"] = s.x_alpha;
    o["x_1ma"] = s.x_one_minus_alpha;
    o["j"] = s.j;
    o["slope0"] = s.slope0;
    o["residual"] = s.residual;
    nlohmann::json prof = nlohmann::json::array();
    if (profile_stride > 0) {
      for (std::size_t i = 0; i < s.profile.size(); i += profile_stride)
        prof.push_back({s.profile[i][0], s.profile[i][1], s.profile[i][2]});
      if (!s.profile.empty() && (s.profile.size() - 1) % profile_stride != 0)
        prof.push_back({s.profile.back()[0], s.profile.back()[1], s.profile.back()[2]});
    }
    o["profile"] = std::move(prof);
    if (s.suspect) {
      o["suspect"] = true;
      o["reason"] = s.reason;
    }
    arr.push_back(std::move(o));
  }
  os << arr.dump(2) << '\n';
}

}  // namespace indefbif
