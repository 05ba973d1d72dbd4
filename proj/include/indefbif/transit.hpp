#pragma once

// Quantities attached to one energy level of the central flow: turning
// points, transit times between abscissas, and the period.

#include "indefbif/core.hpp"
#include "indefbif/tanh_sinh.hpp"

namespace indefbif {

struct TurningPoints {
  double x_m = 0.0;  // left turning point; 0 for open levels (E >= 0)
  double x_M = 0.0;
  bool open = false;
};

/// Roots of phi(u) = E around the center. E = phi(Omega) gives the
/// degenerate pair (Omega, Omega); E below it is a DomainError. For E >= 0
/// only x_M exists and the result is flagged open. Levels within
/// 1e-12 |phi(Omega)| of the homoclinic are rejected unless allow_open.
TurningPoints turning_points(const Well& well, double E, bool allow_open = false);
TurningPoints turning_points(double E, double b, double lambda, double p);

/// One end of a transit: the abscissa and E - phi(u) there. Passing the
/// squared velocity instead of recomputing E - phi(u) keeps nearly
/// singular ends exact; e0 = 0 marks a turning point.
struct TransitEnd {
  double u = 0.0;
  double e0 = 0.0;
};

/// Time spent by the flow between two abscissas on a level, i.e. the
/// integral of (E - phi(u))^{-1/2} over [lo.u, hi.u].
QuadResult transit_quad(const Well& well, TransitEnd lo, TransitEnd hi, double rel_tol = 1e-10);

/// As transit_quad but throws ResolutionError when level doubling does not
/// reach rel_tol within the node table.
double transit(const Well& well, TransitEnd lo, TransitEnd hi, double rel_tol = 1e-10);

double transit_integral(double u_lo, double u_hi, double E, double b, double lambda, double p,
                        bool singular_lo, bool singular_hi);

/// Period of the closed orbit at level E, 2 * transit(x_m, x_M).
double period(const Well& well, double E);
double period(double E, double b, double lambda, double p);

}  // namespace indefbif
