#include "indefbif/core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "indefbif/error.hpp"

namespace indefbif {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

void ProblemParams::validate() const {
  require(std::isfinite(lambda) && lambda < 0.0, "lambda must be negative");
  require(std::isfinite(p) && p > 1.0, "p must exceed 1");
  require(alpha > 0.0 && alpha < 0.5, "alpha must lie in (0, 0.5)");
  require(std::isfinite(b) && b >= 0.0, "b must be nonnegative");
  require(std::isfinite(c) && c > 0.0, "c must be positive");
  require(std::isfinite(nu) && nu > 0.0, "nu must be positive");
  require(std::isfinite(M) && M > 0.0, "M must be positive and finite");
}

ProblemParams ProblemParams::with_b(double b_new) const {
  ProblemParams out = *this;
  out.b = b_new;
  return out;
}

ProblemParams ProblemParams::with_nu(double nu_new) const {
  ProblemParams out = *this;
  out.nu = nu_new;
  return out;
}

ProblemParams ProblemParams::reflected() const {
  ProblemParams out = *this;
  out.c = nu * c;
  out.nu = 1.0 / nu;
  return out;
}

double pow_nonneg(double u, double e) {
  if (!(u >= 0.0)) throw DomainError("negative base in fractional power");
  if (u == 0.0) return 0.0;
  return std::exp(e * std::log(u));
}

double weight_at(double t, const ProblemParams& params) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("t outside [0,1]");
  if (t < params.alpha) return -params.c;
  if (t <= 1.0 - params.alpha) return params.b;
  return -params.nu * params.c;
}

double energy_of(const PhasePoint& pt, double b, double lambda, double p) {
  return pt.v * pt.v + potential(pt.u, b, lambda, p);
}

double potential(double u, double b, double lambda, double p) {
  return lambda * u * u + 2.0 * b / (p + 1.0) * pow_nonneg(u, p + 1.0);
}

double center_abscissa(double b, double lambda, double p) {
  if (!(b > 0.0)) throw DomainError("no center exists for b <= 0");
  return pow_nonneg(-lambda / b, 1.0 / (p - 1.0));
}

double homoclinic_extent(double b, double lambda, double p) {
  if (!(b > 0.0)) throw DomainError("homoclinic is unbounded for b <= 0");
  return pow_nonneg(-lambda * (p + 1.0) / (2.0 * b), 1.0 / (p - 1.0));
}

std::pair<double, double> homoclinic_branch(double u, double b, double lambda,
                                            double p) {
  const double ext = homoclinic_extent(b, lambda, p);
  if (!(u >= 0.0)) throw DomainError("u must be nonnegative");
  if (u > ext * (1.0 + 1e-14)) throw DomainError("u beyond the homoclinic extent");
  if (u >= ext) return {0.0, 0.0};
  const double s = -potential(u, b, lambda, p);
  const double v = s > 0.0 ? std::sqrt(s) : 0.0;
  return {v, -v};
}

double lambda_threshold(int j, double p, double alpha) {
  if (j < 1) throw DomainError("lambda_j needs j >= 1");
  const double w = 2.0 * std::numbers::pi * j / (1.0 - 2.0 * alpha);
  return w * w / (1.0 - p);
}

double small_oscillation_period(double lambda, double p) {
  return 2.0 * std::numbers::pi / std::sqrt(-lambda * (p - 1.0));
}

double critical_b_star(double m0, double lambda, double p) {
  if (!(m0 > 0.0)) throw DomainError("m0 must be positive");
  return -lambda / pow_nonneg(m0, p - 1.0);
}

Well::Well(double b, double lambda, double p)
    : b_(b), lambda_(lambda), p_(p), k_(2.0 * b / (p + 1.0)), q_(p + 1.0) {
  const double qr = std::round(q_);
  q_int_ = (qr == q_ && qr >= 2.0 && qr <= 16.0) ? static_cast<int>(qr) : -1;
}

double Well::phi(double u) const {
  return lambda_ * u * u + k_ * pow_nonneg(u, q_);
}

double Well::dphi(double u) const {
  return 2.0 * lambda_ * u + 2.0 * b_ * pow_nonneg(u, p_);
}

double Well::center() const { return center_abscissa(b_, lambda_, p_); }

double Well::extent() const { return homoclinic_extent(b_, lambda_, p_); }

double Well::gap(double r, double d) const {
  const double u = r + d;
  if (!(r >= 0.0) || !(u >= 0.0)) throw DomainError("negative abscissa in gap");
  double power_diff;  // u^q - r^q
  if (q_int_ > 0) {
    double s = 1.0;
    double rp = 1.0;
    // s = sum_{i} u^i r^{q-1-i}, Horner in u with coefficients r^{q-1-i}
    for (int i = q_int_ - 2; i >= 0; --i) {
      rp *= r;
      s = s * u + rp;
    }
    power_diff = d * s;
  } else if (r == 0.0) {
    power_diff = pow_nonneg(u, q_);
  } else {
    power_diff = pow_nonneg(r, q_) * std::expm1(q_ * std::log1p(d / r));
  }
  return -lambda_ * d * (2.0 * r + d) - k_ * power_diff;
}

}  // namespace indefbif
