#pragma once

// Reference configuration shared by the curve, time-map and solver tests:
// p = 2, alpha = 0.25, c = 0.1, M = 1, lambda midway between lambda_2 and
// lambda_1. Curves are built once per process.

#include "indefbif/core.hpp"
#include "indefbif/gamma.hpp"

namespace ref {

inline indefbif::ProblemParams params(double nu = 1.0) {
  indefbif::ProblemParams pr;
  pr.lambda = 0.5 * (indefbif::lambda_threshold(1, 2.0, 0.25) +
                     indefbif::lambda_threshold(2, 2.0, 0.25));
  pr.nu = nu;
  return pr;
}

inline const indefbif::GammaCurve& gamma0() {
  static const auto g = indefbif::GammaCurve::build(indefbif::Side::left, params());
  return g;
}

inline const indefbif::GammaCurve& gamma1() {
  static const auto g = indefbif::GammaCurve::build(indefbif::Side::right, params());
  return g;
}

inline const indefbif::GammaCurve& gamma1_nu105() {
  static const auto g = indefbif::GammaCurve::build(indefbif::Side::right, params(1.05));
  return g;
}

inline const indefbif::GammaCurve& gamma0_nu105() {
  static const auto g = indefbif::GammaCurve::build(indefbif::Side::left, params(1.05));
  return g;
}

inline double b_star() {
  return indefbif::critical_b_star(gamma0().m0(), params().lambda, params().p);
}

}  // namespace ref
