#pragma once

// Bifurcation diagrams in (b, u(alpha)).
//
// A sweep solves on a refinable grid of b and links the solutions of
// neighbouring levels into branches (graphs over b). Branch ends are
// paired afterwards: two ends with nothing in between are a turning point,
// two ends around a continuing branch are a pitchfork attachment. The
// bifurcation points themselves come from the scalar function
// G(b) = theta(x_t(b), b) + (i - 1) T - (1 - 2 alpha).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "indefbif/solver.hpp"

namespace indefbif {

/// Curves and derived constants of one parameter set.
class DiagramContext {
 public:
  explicit DiagramContext(const ProblemParams& params, const GammaOptions& opt = {});

  const ProblemParams& params() const { return params_; }
  const GammaCurve& gamma0() const { return g0_; }
  const GammaCurve& gamma1() const { return g1_; }
  double b_star() const { return b_star_; }
  double b_h() const { return b_h_; }

 private:
  ProblemParams params_;
  GammaCurve g0_;
  GammaCurve g1_;
  double b_star_ = 0.0;
  double b_h_ = 0.0;
};

struct DiagramPoint {
  double b = 0.0;
  double u_alpha = 0.0;
  double u_one_minus_alpha = 0.0;
  int j = 0;
  double x = 0.0;
  bool symmetric = false;
  int branch_id = -1;
  int component_id = -1;
};

enum class TurningKind { subcritical, supercritical };
std::string turning_kind_name(TurningKind k);

struct TurningPoint {
  int branch_id = -1;
  double b = 0.0;
  double u_alpha = 0.0;
  TurningKind kind = TurningKind::subcritical;
};

/// Two branch ends meeting a branch that continues between them.
struct Attachment {
  double b = 0.0;
  double u_alpha = 0.0;
  int host_branch = -1;
  std::vector<int> branches;
  bool ends_below = true;  // the attached branches exist for b below
  bool host_symmetric = false;
  bool attached_symmetric = false;
};

struct SweepOptions {
  int n_b = 48;
  /// Refinement stops below this spacing, relative to b*.
  double b_tol = 1e-6;
  int max_levels = 4000;
  /// Accept the nearest of several candidates when it is this much closer
  /// than the second one.
  double ratio = 0.25;
  SolverOptions solver;
};

struct Diagram {
  std::vector<double> levels;
  std::vector<DiagramPoint> points;  // sorted by b, then u_alpha
  std::vector<TurningPoint> turning_points;
  std::vector<Attachment> attachments;
  int branches = 0;
  int components = 0;
  std::vector<double> ambiguous_b;  // links decided by proximity at b_tol
  int suspect_solutions = 0;
  std::vector<std::string> notes;
};

/// Solves on [b_lo, b_hi] and assembles branches.
Diagram sweep(const DiagramContext& ctx, double b_lo, double b_hi, const SweepOptions& opt = {});

/// CSV with header b,u_alpha,j,branch_id,component_id.
void write_diagram_csv(std::ostream& os, const Diagram& d);

/// Number of components with a point in the box [b_lo, b_hi] x [u_lo, u_hi].
int components_in_box(const Diagram& d, double b_lo, double b_hi, double u_lo, double u_hi);

/// G(b) for the i-th loop; nu = 1 only.
double bifurcation_function(const DiagramContext& ctx, int i, double b);

struct BifurcationSearchOptions {
  int n_scan = 48;
  /// Offset of the sign checks on both sides, relative to b*.
  double delta_b = 1e-6;
  /// Lowest b tried on the minus side, relative to b*.
  double b_min = 1e-4;
  /// Largest curve range (times m0) tried when the minus side runs out of
  /// curve before a crossing shows up.
  double max_x_factor = 512.0;
};

struct BifurcationPoint {
  int i = 1;
  int sign = +1;
  double b = 0.0;
  double g_before = 0.0;  // G(b - delta)
  double g_after = 0.0;   // G(b + delta)
  double delta = 0.0;
  std::vector<double> crossings;  // all crossings of the right direction
  double x_factor = 0.0;          // curve range used
};

/// b_b^{i,sign}: the largest up-crossing of G on (b*, b_h) for sign = +1,
/// the smallest down-crossing on (0, b*) for sign = -1.
BifurcationPoint find_bifurcation_point(const DiagramContext& ctx, int i, int sign,
                                        const BifurcationSearchOptions& opt = {});

enum class NuOneType {
  transcritical_nondegenerate_pitchfork,
  transcritical_degenerate_pitchfork,
  double_pitchfork,
  undetermined
};
std::string nu_one_type_name(NuOneType t);

struct Nu1Classification {
  NuOneType type = NuOneType::undetermined;
  double x_t = 0.0;
  double h = 0.0;  // finite-difference step used
  double slope1 = 0.0, slope2 = 0.0;
  double second1 = 0.0, second2 = 0.0;
  double slope_tol = 0.0;
  double noise = 0.0;  // second-difference noise floor
  bool stable = false;  // same type with the step halved
  std::string detail;
};

Nu1Classification classify_nu1_point(const DiagramContext& ctx, double b_point);

enum class ImperfectCase { left, right, other };
std::string imperfect_case_name(ImperfectCase c);

struct ImperfectOptions {
  double nu_start = 1.05;
  int max_halvings = 10;
  int n_x = 33;
  SweepOptions sweep;
  /// nu values of the gap sequence.
  std::vector<double> gap_nus{1.05, 1.025, 1.0125};
};

struct GapSample {
  double nu = 0.0;
  double gap = 0.0;
  double b_T = 0.0;
};

struct ImperfectReport {
  bool degenerate = false;  // condition on the second derivatives fails
  double nu = 0.0;          // accepted perturbation
  std::vector<double> nus_tried;
  double b_b = 0.0;
  double x_t = 0.0;
  double x_lo = 0.0, x_hi = 0.0;  // window in u(alpha)
  double delta_b = 0.0;           // b window is [b_b - 2 delta_b, b_b + delta_b]
  double turning_b = 0.0;         // b_T on the tau_{2,nu} branch
  std::vector<double> turning_bs; // every turning point found in the window
  ImperfectCase shape = ImperfectCase::other;
  bool subcritical = false;
  int components = 0;            // from the sweep at nu
  bool separated = false;
  double sweep_turning_b = 0.0;  // turning point seen by the sweep
  std::vector<GapSample> gaps;
  bool gap_monotone = false;
  std::vector<std::string> notes;
};

/// Follows the perturbation of b_b^{1,+} for nu > 1. ctx must be the
/// symmetric problem; its classification decides the expected case.
ImperfectReport imperfect_analysis(const DiagramContext& ctx, double b_b,
                                   const Nu1Classification& cls, const ImperfectOptions& opt = {});

struct ReflectionReport {
  bool ok = false;
  std::vector<double> bs;
  std::vector<std::size_t> counts_direct, counts_reflected, counts_solver;
  double max_mismatch = 0.0;         // direct oracle vs reflected oracle
  double max_solver_mismatch = 0.0;  // reflected solver vs reflected oracle
  std::vector<std::string> notes;
};

/// Compares the problem (c, nu < 1) with (nu c, 1 / nu) through t -> 1 - t
/// using independent shooting on both, at the given weights; the time-map
/// solver on the reflected problem is checked against its oracle too.
ReflectionReport reflection_check(const ProblemParams& params, const std::vector<double>& bs,
                                  const OracleOptions& opt = {});

struct BifurcationReport {
  double b_star = 0.0;
  double b_h = 0.0;
  struct BPoint {
    int i;
    int sign;
    double b;
  };
  std::vector<BPoint> b_points;
  std::vector<TurningPoint> turning_points;
  NuOneType nu_one_type = NuOneType::undetermined;
  int components = 0;
  std::optional<ImperfectReport> imperfect;
  std::vector<std::string> notes;
};

void write_report_json(std::ostream& os, const BifurcationReport& r);

}  // namespace indefbif
