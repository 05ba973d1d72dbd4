#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "indefbif/timemap.hpp"

namespace indefbif {

struct BvpSolution {
  double x_alpha = 0.0;            // u(alpha)
  double x_one_minus_alpha = 0.0;  // u(1 - alpha)
  int j = 0;                       // crossing index of the time map
  double slope0 = 0.0;             // u'(0)
  std::vector<std::array<double, 3>> profile;  // (t, u, u')
  double residual = 0.0;           // |u(1) - M|
  double stitch_error = 0.0;       // central flow from the map root: distance from Gamma_{1,nu}
  double min_u = 0.0;
  int multiplicity = 1;            // 2 for a root on the tangency abscissa
  bool symmetric_candidate = false;  // x = x0(x) route (nu = 1)
  bool suspect = false;
  std::string reason;
};

struct SolverOptions {
  int grid_per_segment = 128;
  /// |tau_j(x) - (1 - 2 alpha)| accepted at a polished root; larger
  /// residuals mark sign changes across a jump of the map.
  double map_residual = 1e-8;
  double residual_tol = 1e-7;  // times max(1, M)
  double stitch_tol = 1e-8;
  /// Allowed |u(alpha) - x| after refining the slope on u(1) - M; relative
  /// to max(1, x).
  double polish_tol = 1e-9;
  int profile_points = 201;
  /// Reconstruction runs through the central flow near the homoclinic, where
  /// errors grow by ~exp(sqrt(-lambda) (1 - 2 alpha)); hence the tight default.
  OdeSettings ode{1e-13, 1e-15};
  /// Symmetric problems use the theta maps on closed orbits.
  bool use_theta = true;
};

/// Cap on the crossing index: tau grows by one period per two crossings and
/// no period is shorter than the small-oscillation period.
int max_crossing_index(const ProblemParams& params);

/// Positive solutions at the weight of tm (and the nu of its curves).
std::vector<BvpSolution> solve_at(const TimeMaps& tm, const SolverOptions& opt = {});

/// Builds the time maps for b from the given curves and solves.
std::vector<BvpSolution> solve_at(double b, const GammaCurve& gamma0, const GammaCurve& gamma1,
                                  const SolverOptions& opt = {});

/// Full solution from its state at alpha on Gamma_0: outer-left, central and
/// outer-right pieces integrated in one pass and checked at both joins.
BvpSolution reconstruct(double x, int j, const TimeMaps& tm, const SolverOptions& opt = {});

struct OracleOptions {
  int n_scan = 4000;
  OdeSettings ode{1e-13, 1e-15};
  int profile_points = 201;
};

/// Independent count: scans u(1; s) - M over slopes in [s_lo, s_hi],
/// bisects every sign change between positive trajectories to 1e-12.
std::vector<BvpSolution> shooting_oracle(const ProblemParams& params, double s_lo, double s_hi,
                                         const OracleOptions& opt = {});

/// Slope window of the oracle: the curve's slope range widened by 20%.
std::pair<double, double> oracle_window(const GammaCurve& gamma0);

/// JSON array of solutions; profile_stride 0 drops profiles.
void write_solutions_json(std::ostream& os, const std::vector<BvpSolution>& sols,
                          int profile_stride = 1);

}  // namespace indefbif
