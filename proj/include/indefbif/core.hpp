#pragma once

#include <utility>

namespace indefbif {

/// Scalars of the boundary value problem
///   -u'' = lambda u + a(t) u^p on (0,1),  u(0) = u(1) = M,
/// with the piecewise weight a(t) = -c on [0,alpha), b on [alpha,1-alpha],
/// -nu c on (1-alpha,1].
struct ProblemParams {
  double lambda = -1.0;
  double p = 2.0;
  double alpha = 0.25;
  double b = 0.0;
  double c = 0.1;
  double nu = 1.0;
  double M = 1.0;

  /// Throws DomainError when any invariant is broken.
  void validate() const;

  ProblemParams with_b(double b_new) const;
  ProblemParams with_nu(double nu_new) const;

  /// Parameters of the problem solved by u(1-t): left weight nu c, ratio 1/nu.
  ProblemParams reflected() const;

  /// Length of the central interval, 1 - 2 alpha.
  double central_length() const { return 1.0 - 2.0 * alpha; }

  bool symmetric() const { return nu == 1.0; }

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;
};

struct PhasePoint {
  double u = 0.0;
  double v = 0.0;
};

/// u^e for u >= 0; negative u is a DomainError.
double pow_nonneg(double u, double e);

double weight_at(double t, const ProblemParams& params);

/// First integral v^2 + lambda u^2 + 2b/(p+1) u^{p+1} of the central flow.
double energy_of(const PhasePoint& pt, double b, double lambda, double p);

/// phi(u) = lambda u^2 + 2b/(p+1) u^{p+1}.
double potential(double u, double b, double lambda, double p);

/// Omega = (-lambda/b)^{1/(p-1)}; b must be positive.
double center_abscissa(double b, double lambda, double p);

/// Right end of the homoclinic loop, (-lambda (p+1) / 2b)^{1/(p-1)}.
double homoclinic_extent(double b, double lambda, double p);

/// (+v, -v) on the zero level set at abscissa u.
std::pair<double, double> homoclinic_branch(double u, double b, double lambda,
                                            double p);

double lambda_threshold(int j, double p, double alpha);

double small_oscillation_period(double lambda, double p);

/// b at which the center sits on the zero of the left boundary curve.
double critical_b_star(double m0, double lambda, double p);

/// The potential well of the central equation at fixed (b, lambda, p).
///
/// Besides the closed forms, it exposes gap(r, d) = phi(r) - phi(r + d)
/// evaluated without cancellation; the singular quadratures near turning
/// points depend on it.
class Well {
 public:
  Well(double b, double lambda, double p);

  double b() const { return b_; }
  double lambda() const { return lambda_; }
  double p() const { return p_; }
  /// Coefficient 2b/(p+1) of u^{p+1}.
  double k() const { return k_; }
  /// Exponent p+1.
  double q() const { return q_; }
  /// p+1 when it is a small integer (<= 16), otherwise -1.
  int integer_q() const { return q_int_; }

  double phi(double u) const;
  double dphi(double u) const;
  double energy(const PhasePoint& pt) const { return pt.v * pt.v + phi(pt.u); }

  double center() const;
  double center_energy() const { return phi(center()); }
  double extent() const;

  /// phi(r) - phi(r + d) for r >= 0, r + d >= 0.
  double gap(double r, double d) const;

 private:
  double b_;
  double lambda_;
  double p_;
  double k_;
  double q_;
  int q_int_;
};

}  // namespace indefbif
