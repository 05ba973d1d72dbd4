#pragma once

// Time maps of the central flow between the boundary curves.
//
// Every time is computed on the energy level of the start point as a sum
// of transit integrals. Points of a level are located by their phase:
// the signed flow time from the right turning point x_M (negative on the
// upper branch, positive on the lower one). Closed levels wrap modulo the
// period, so the time from a start to the j-th crossing of Gamma_{1,nu}
// follows from sorted phase differences, for every sign configuration.

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "indefbif/gamma.hpp"
#include "indefbif/transit.hpp"

namespace indefbif {

struct OrbitGeometry {
  double E = 0.0;
  double x_m = 0.0;
  double x_M = 0.0;
  bool open = false;
  std::vector<CurveHit> gamma0_hits;
  std::vector<CurveHit> gamma1_hits;  // sign of y is the branch sign
};

enum class MapKind { tau, theta1, theta2, period, tau_nu };
std::string_view map_kind_name(MapKind k);

struct TimeMapSample {
  double x = 0.0;
  int j = 1;
  double value = 0.0;
  MapKind kind = MapKind::tau;
  double E = 0.0;
};

struct TimeMapOptions {
  double quad_tol = 1e-10;
  /// Polish curve crossings on fresh outer shots instead of the interpolant.
  bool exact_hits = false;
};

/// All crossing times of one start point, ready for any j.
struct PhaseSlice {
  double x = 0.0;
  double y = 0.0;
  double E = 0.0;
  bool open = false;
  double period = 0.0;              // 0 for open levels
  std::vector<double> hit_times;    // within one revolution, ascending,
                                    // tangential hits listed twice
  std::vector<double> hit_abscissas;

  /// Time to the j-th crossing; NotReachableError when the flow leaves the
  /// positive region first (open levels) or never meets the curve.
  double tau(int j) const;
  std::size_t hits_per_turn() const { return hit_times.size(); }
};

/// Time maps at one value of b for a pair of boundary curves. Holds the
/// b-dependent curve data (energy extrema, tangencies); immutable and safe
/// to share between threads after construction.
class TimeMaps {
 public:
  TimeMaps(const GammaCurve& gamma0, const GammaCurve& gamma1, double b,
           const TimeMapOptions& opt = {});

  double b() const { return b_; }
  const Well& well() const { return well_; }
  const GammaCurve& gamma0() const { return g0_; }
  const GammaCurve& gamma1() const { return g1_; }
  bool symmetric() const;

  const TangencyData& tangency0() const { return t0_; }
  const TangencyData& tangency1() const { return t1_; }
  const std::vector<CurveExtremum>& extrema0() const { return ext0_; }
  const std::vector<CurveExtremum>& extrema1() const { return ext1_; }
  /// x_{h,0}^- and x_{h,0}^+ when the homoclinic meets Gamma_0 (b < b_h).
  const std::optional<std::pair<double, double>>& homoclinic0() const { return h0_; }

  /// Energy of the orbit through (x, y0(x)).
  double energy_at(double x) const;
  bool closed_at(double x) const;

  OrbitGeometry geometry(double x) const;
  PhaseSlice slice(double x) const;

  TimeMapSample tau(double x, int j) const;
  /// theta_1 (which = 1) or theta_2; symmetric problems only.
  TimeMapSample theta(double x, int which) const;
  TimeMapSample period_at(double x) const;
  /// Other crossing of the orbit through x with Gamma_0.
  double x0_partner(double x) const;

  /// Both theta values at once (they share the level data).
  std::pair<double, double> thetas(double x) const;

  /// Phase of a point (u, v) on level E with the given turning points.
  double phase(double u, double v, const TurningPoints& tp, double T) const;

 private:
  double start_y(double x) const;
  double arc_from_right(double u, double v, const TurningPoints& tp, double T) const;

  const GammaCurve& g0_;
  const GammaCurve& g1_;
  double b_;
  TimeMapOptions opt_;
  Well well_;
  std::vector<CurveExtremum> ext0_, ext1_;
  TangencyData t0_, t1_;
  std::optional<std::pair<double, double>> h0_;
};

/// Crossings of the level E with a curve at weight b.
std::vector<CurveHit> curve_hits(double E, double b, const GammaCurve& curve);

/// Independent check of tau_j: integrates the central flow from
/// (x, y0(x)) and stops at the j-th sign change of v - y1(u). The step size
/// is capped at max_step_fraction of the small-oscillation period so close
/// pairs of crossings are not stepped over.
double tau_ode(const TimeMaps& tm, double x, int j, const OdeSettings& settings = {1e-12, 1e-14},
               double max_step_fraction = 1.0 / 400.0);

/// CSV header x,j,kind,value,E.
void write_timemap_csv(std::ostream& os, const std::vector<TimeMapSample>& samples);

}  // namespace indefbif
