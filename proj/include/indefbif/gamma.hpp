#pragma once

// Boundary curves of the outer problems in the (u, u') plane.
//
// Gamma_0 collects the states (u(alpha), u'(alpha)) of nonnegative
// solutions of the left outer problem; it is the graph of an increasing
// function y0^c. Gamma_{1,nu} collects the states at 1 - alpha of the
// right outer problem integrated back from t = 1; it is the graph of
// -y0^{nu c}. Both are sampled by shooting with variational equations so
// every sample carries an exact slope, and interpolated by monotone cubic
// Hermite pieces.

#include <iosfwd>
#include <optional>
#include <vector>

#include "indefbif/core.hpp"
#include "indefbif/dopri.hpp"
#include "indefbif/ode.hpp"

namespace indefbif {

struct GammaOptions {
  /// Largest allowed gap between neighbouring samples in x; 0 selects
  /// m0 / 400.
  double x_resolution = 0.0;
  /// The curve is sampled over [0, x_max_factor * m0].
  double x_max_factor = 8.0;
  /// Midpoint Hermite check: |y_shot - y_interp| <= interp_tol * max|y|.
  double interp_tol = 1e-12;
  int initial_samples = 64;
  std::size_t max_samples = 200000;
  OdeSettings ode{1e-12, 1e-14};
};

/// Endpoint of one outer shot together with its derivative in the slope.
struct OuterShot {
  double s = 0.0;  // initial slope of the left-type problem
  double x = 0.0, y = 0.0;
  double dx = 0.0, dy = 0.0;
  bool positive = true;  // u stayed >= 0 on the outer interval
};

/// Integrates -u'' = lambda u - c u^p on [0, alpha] from (M, s) with its
/// first variational equation. The right outer problem is the same one
/// with c -> nu c after t -> 1 - t.
class OuterShooter {
 public:
  OuterShooter(double c_eff, const ProblemParams& params, const OdeSettings& settings);
  OuterShot shoot(double s) const;
  const ProblemParams& params() const { return params_; }
  double c_eff() const { return c_; }

 private:
  double c_;
  ProblemParams params_;
  OdeSettings settings_;
};

struct GammaSample {
  double x = 0.0;
  double y = 0.0;
  double dydx = 0.0;  // exact slope of the curve
  double s = 0.0;     // left-type shooting slope
  double dxds = 0.0;
};

/// A point of the curve together with the boundary slope that produced it
/// (u'(0) on the left, u'(1) on the right).
struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  double dydx = 0.0;
  double slope0 = 0.0;
};

struct TangencyData {
  double x_t = 0.0;
  double E_t = 0.0;
  bool is_unique = true;
  double b = 0.0;
  /// y on the curve at x_t.
  double y_t = 0.0;
};

/// Extremum of the energy along the curve at fixed b.
struct CurveExtremum {
  double x = 0.0;
  double E = 0.0;
  bool minimum = true;
};

/// A crossing of the curve with an energy level.
struct CurveHit {
  double x = 0.0;
  double y = 0.0;
  int multiplicity = 1;  // 2 at a tangency
};

class GammaCurve {
 public:
  static GammaCurve build(Side side, const ProblemParams& params, const GammaOptions& opt = {});

  Side side() const { return side_; }
  const ProblemParams& params() const { return params_; }
  double c_eff() const { return shooter_.c_eff(); }
  const std::vector<GammaSample>& samples() const { return samples_; }
  double x_min() const { return samples_.front().x; }
  double x_max() const { return samples_.back().x; }
  bool contains(double x) const { return x >= x_min() && x <= x_max(); }

  /// Interpolated ordinate and slope; x outside the range is a DomainError.
  double y(double x) const;
  double dydx(double x) const;

  /// Fresh shot landing exactly (to the integrator tolerance) at abscissa x.
  CurvePoint shoot_at(double x) const;
  /// Fresh shot from a left-type slope.
  CurvePoint shoot_slope(double s) const;
  /// Boundary slope (u'(0) or u'(1)) for a left-type slope.
  double boundary_slope(double s) const { return side_ == Side::left ? s : -s; }

  /// Zero of y, polished on fresh shots at build time.
  double m0() const { return m0_; }
  double m0_slope() const { return m0_s_; }

  /// (y(x))^2 + phi(x) at weight b.
  double energy_on_curve(double x, double b) const;

  /// Interior extrema of the energy along the curve at weight b, located on
  /// the interpolant and polished on fresh shots; sorted by x.
  std::vector<CurveExtremum> energy_extrema(double b) const;

  /// All abscissas where the curve meets the level E at weight b. A
  /// crossing at an extremum is reported once with multiplicity 2.
  std::vector<CurveHit> level_hits(double E, double b, bool exact = false) const;
  std::vector<CurveHit> level_hits(double E, double b, const std::vector<CurveExtremum>& ext,
                                   bool exact = false) const;

  /// CSV with header x,y,slope0.
  void write_csv(std::ostream& os) const;

 private:
  GammaCurve(Side side, const ProblemParams& params, OuterShooter shooter);
  CurvePoint to_point(const OuterShot& shot) const;
  double sample_energy(std::size_t i, const Well& well) const;
  std::size_t interval_of(double x) const;
  double hermite(std::size_t i, double x, double* slope) const;
  double polish_extremum(double x_guess, std::size_t i, const Well& well) const;
  double polish_level(double E, const Well& well, double x_lo, double x_hi) const;

  Side side_;
  ProblemParams params_;
  OuterShooter shooter_;
  std::vector<GammaSample> samples_;
  std::vector<double> limited_;  // Fritsch-Carlson limited slopes
  double m0_ = 0.0;
  double m0_s_ = 0.0;
};

double find_m0(const GammaCurve& curve);

double energy_on_curve(const GammaCurve& curve, double x, double b);

/// Global minimiser of the energy along the curve at weight b. The minimum
/// must be interior; a second separated local minimum within 1e-9 (relative)
/// clears is_unique.
TangencyData tangent_orbit(const GammaCurve& curve, double b);
/// Same, reusing extrema already computed by curve.energy_extrema(b).
TangencyData tangent_orbit(const GammaCurve& curve, double b,
                           const std::vector<CurveExtremum>& extrema);

struct BhResult {
  double b_h = 0.0;         // effective value (minimum over the curves)
  double b_h_left = 0.0;
  double b_h_right = 0.0;
  bool unique_tangency = true;
};

/// Weight at which the tangent level reaches the homoclinic level E = 0.
double find_b_h(const GammaCurve& curve, double b_lo, double b_hi);
BhResult find_b_h(const GammaCurve& left, const GammaCurve& right, double b_lo, double b_hi);

/// Abscissas where the homoclinic meets the curve on either side of the
/// tangency; b must lie below b_h.
std::pair<double, double> homoclinic_hits(const GammaCurve& curve, double b);

}  // namespace indefbif
