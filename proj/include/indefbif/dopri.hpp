#pragma once

// Dormand-Prince 5(4) with Hairer's 4th-order continuous extension.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "indefbif/error.hpp"

namespace indefbif {

struct OdeSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 1'000'000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("ODE tolerances must be positive");
    if (!(max_step > 0.0)) throw DomainError("max_step must be positive");
    if (max_steps <= 0) throw DomainError("max_steps must be positive");
  }

  friend bool operator==(const OdeSettings&, const OdeSettings&) = default;
};

template <std::size_t N>
using Vec = std::array<double, N>;

/// One accepted step with its continuous extension.
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> r{};

  double t1() const { return t0 + h; }

  Vec<N> at(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
    return y;
  }
};

enum class RunStatus { completed, stopped, step_limit };

namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// error coefficients: 5th order minus embedded 4th order weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace dopri

/// Adaptive explicit integrator for y' = f(t, y), y in R^N.
///
/// Rhs is any callable Vec<N>(double, const Vec<N>&). Integration may run
/// backward (t1 < t0). The step observer receives every accepted step and
/// may stop the run by returning false.
template <std::size_t N, class Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, OdeSettings settings) : f_(std::move(rhs)), s_(settings) {
    s_.validate();
  }

  const OdeSettings& settings() const { return s_; }

  /// One unadapted step of size h from (t, y). Used to refine event
  /// locations: the map h -> single_step(t, y, h) is a smooth 5th-order
  /// accurate extension of the accepted step.
  Vec<N> single_step(double t, const Vec<N>& y, double h) const {
    Vec<N> k1 = f_(t, y);
    Stages st = stages(t, y, h, k1);
    return st.y5;
  }

  Vec<N> rhs(double t, const Vec<N>& y) const { return f_(t, y); }

  template <class OnStep>
  RunStatus run(double t0, Vec<N> y0, double t1, OnStep&& on_step) const {
    using namespace dopri;
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    if (span == 0.0) return RunStatus::completed;
    double t = t0;
    Vec<N> y = y0;
    Vec<N> k1 = f_(t, y);
    double h = std::min(initial_step(t, y, k1, dir, span), s_.max_step);
    long n = 0;
    bool last_rejected = false;
    while (dir * (t1 - t) > 0.0) {
      if (++n > s_.max_steps) return RunStatus::step_limit;
      double remaining = std::abs(t1 - t);
      bool last = false;
      if (h >= remaining * (1.0 - 1e-12)) {
        h = remaining;
        last = true;
      }
      const double hs = dir * h;
      Stages st = stages(t, y, hs, k1);
      const Vec<N> k7 = f_(t + hs, st.y5);
      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double ei = hs * (e1 * k1[i] + e3 * st.k3[i] + e4 * st.k4[i] + e5 * st.k5[i] +
                                e6 * st.k6[i] + e7 * k7[i]);
        const double sc = s_.abs_tol + s_.rel_tol * std::max(std::abs(y[i]), std::abs(st.y5[i]));
        err += (ei / sc) * (ei / sc);
      }
      err = std::sqrt(err / static_cast<double>(N));
      if (!std::isfinite(err)) {
        h *= 0.1;
        last_rejected = true;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) return RunStatus::step_limit;
        continue;
      }
      if (err <= 1.0) {
        DenseStep<N> ds;
        ds.t0 = t;
        ds.h = hs;
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = st.y5[i] - y[i];
          const double bspl = hs * k1[i] - dy;
          ds.r[0][i] = y[i];
          ds.r[1][i] = dy;
          ds.r[2][i] = bspl;
          ds.r[3][i] = dy - hs * k7[i] - bspl;
          ds.r[4][i] = hs * (d1 * k1[i] + d3 * st.k3[i] + d4 * st.k4[i] + d5 * st.k5[i] +
                             d6 * st.k6[i] + d7 * k7[i]);
        }
        const Vec<N> y_prev = y;
        t = last ? t1 : t + hs;
        y = st.y5;
        k1 = k7;
        if (!on_step(ds, y_prev, y)) return RunStatus::stopped;
        double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
        h = std::min(h * fac, s_.max_step);
        last_rejected = false;
      } else {
        const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
        h *= fac;
        last_rejected = true;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) return RunStatus::step_limit;
      }
    }
    return RunStatus::completed;
  }

  /// Locates the zero of g(t, y) inside an accepted step where g changes
  /// sign between its ends; returns (t, y).
  template <class G>
  std::pair<double, Vec<N>> locate(const DenseStep<N>& step, double g0, double g1, G&& g) const {
    const Vec<N> y0 = step.r[0];
    auto value = [&](double s) {
      if (s <= 0.0) return g0;
      const Vec<N> ys = single_step(step.t0, y0, s * step.h);
      return g(step.t0 + s * step.h, ys);
    };
    double lo = 0.0, hi = 1.0;
    double flo = g0, fhi = g1;
    if (fhi == 0.0) return {step.t1(), single_step(step.t0, y0, step.h)};
    boost::uintmax_t iters = 100;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15; };
    auto r = boost::math::tools::toms748_solve(value, lo, hi, flo, fhi, tol, iters);
    const double s = 0.5 * (r.first + r.second);
    return {step.t0 + s * step.h, single_step(step.t0, y0, s * step.h)};
  }

 private:
  struct Stages {
    Vec<N> k3, k4, k5, k6, y5;
  };

  Stages stages(double t, const Vec<N>& y, double h, const Vec<N>& k1) const {
    using namespace dopri;
    Stages st;
    Vec<N> tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    const Vec<N> k2 = f_(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    st.k3 = f_(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * st.k3[i]);
    st.k4 = f_(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * st.k3[i] + a54 * st.k4[i]);
    st.k5 = f_(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * st.k3[i] + a64 * st.k4[i] +
                           a65 * st.k5[i]);
    st.k6 = f_(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      st.y5[i] = y[i] + h * (a71 * k1[i] + a73 * st.k3[i] + a74 * st.k4[i] + a75 * st.k5[i] +
                             a76 * st.k6[i]);
    return st;
  }

  // Hairer's starting step heuristic.
  double initial_step(double t, const Vec<N>& y, const Vec<N>& k1, double dir, double span) const {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = s_.abs_tol + s_.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vec<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h0 * k1[i];
    const Vec<N> k2 = f_(t + dir * h0, y1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = s_.abs_tol + s_.rel_tol * std::abs(y[i]);
      d2 += ((k2[i] - k1[i]) / sc) * ((k2[i] - k1[i]) / sc);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, span});
  }

  Rhs f_;
  OdeSettings s_;
};

}  // namespace indefbif
