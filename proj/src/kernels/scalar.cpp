#include <cmath>

#include "indefbif/kernels.hpp"

namespace indefbif::kernels {

namespace {

// u^q - r^q for integer q, as d * sum_i u^i r^{q-1-i}
inline double power_diff_int(double r, double u, double d, int q) {
  double s = 1.0;
  double rp = 1.0;
  for (int i = q - 2; i >= 0; --i) {
    rp *= r;
    s = s * u + rp;
  }
  return d * s;
}

inline double power_diff_real(double r, double u, double d, double q) {
  if (r == 0.0) return u > 0.0 ? std::exp(q * std::log(u)) : 0.0;
  return std::exp(q * std::log(r)) * std::expm1(q * std::log1p(d / r));
}

}  // namespace

GapSum gap_sum_scalar(const GapSumArgs& a, std::span<const double> z, std::span<const double> w) {
  GapSum out;
  const std::size_t n = z.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.scale * z[i];
    const double u = a.r + d;
    const double pd = a.q_int > 0 ? power_diff_int(a.r, u, d, a.q_int)
                                  : power_diff_real(a.r, u, d, a.q);
    const double g = a.e0 - a.lambda * d * (2.0 * a.r + d) - a.k * pd;
    if (g > 0.0 && u >= 0.0) {
      out.sum += w[i] / std::sqrt(g);
    } else {
      ++out.nonpositive;
    }
  }
  return out;
}

void energies_scalar(double lambda, double k, double q, int q_int, std::span<const double> u,
                     std::span<const double> v, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    double uq;
    if (q_int > 0) {
      uq = 1.0;
      for (int m = 0; m < q_int; ++m) uq *= u[i];
    } else {
      uq = u[i] > 0.0 ? std::exp(q * std::log(u[i])) : 0.0;
    }
    out[i] = v[i] * v[i] + lambda * u[i] * u[i] + k * uq;
  }
}

}  // namespace indefbif::kernels
