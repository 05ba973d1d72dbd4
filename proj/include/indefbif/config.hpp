#pragma once

// Run configuration: a flat INI file whose sections mirror the modules.
// Unknown sections or keys are rejected; every value is validated at parse.
// serialize() writes the canonical form (every key, 17 significant digits),
// which is also what the hash is taken over.

#include <cstdint>
#include <optional>
#include <string>

#include "indefbif/diagram.hpp"

namespace indefbif {

enum class ProfileMode { full, sparse, none };
std::string profile_mode_name(ProfileMode m);
ProfileMode parse_profile_mode(const std::string& s);

struct RunConfig {
  struct Problem {
    /// lambda is either given directly or placed midway between
    /// lambda_{k+1} and lambda_k for lambda_between = k.
    std::optional<double> lambda;
    std::optional<int> lambda_between = 1;
    double p = 2.0;
    double alpha = 0.25;
    double c = 0.1;
    double nu = 1.0;
    double M = 1.0;
    /// Weight of single-point runs: absolute b, or b_rel times b*.
    std::optional<double> b;
    double b_rel = 1.0;
    friend bool operator==(const Problem&, const Problem&) = default;
  } problem;

  OdeSettings ode{1e-12, 1e-14};

  struct Gamma {
    double x_resolution = 0.0;
    double x_max_factor = 8.0;
    double interp_tol = 1e-12;
    friend bool operator==(const Gamma&, const Gamma&) = default;
  } gamma;

  struct Phase {
    int orbits = 6;
    int points = 400;
    friend bool operator==(const Phase&, const Phase&) = default;
  } phase;

  struct TimeMap {
    double quad_tol = 1e-10;
    int n_x = 400;
    /// Export range in units of m0.
    double x_max_rel = 4.0;
    int j_max = 4;
    friend bool operator==(const TimeMap&, const TimeMap&) = default;
  } timemap;

  struct Solver {
    int grid_per_segment = 128;
    double map_residual = 1e-8;
    double residual_tol = 1e-7;
    double stitch_tol = 1e-8;
    double polish_tol = 1e-9;
    int profile_points = 201;
    friend bool operator==(const Solver&, const Solver&) = default;
  } solver;

  struct Oracle {
    int n_scan = 4000;
    friend bool operator==(const Oracle&, const Oracle&) = default;
  } oracle;

  struct Diagram {
    /// Sweep range relative to b*.
    double b_lo_rel = 0.05;
    double b_hi_rel = 1.8;
    int n_b = 48;
    double b_tol = 1e-6;
    double ratio = 0.25;
    int max_levels = 4000;
    int loop = 1;
    bool minus_side = false;
    bool imperfect = true;
    double nu_start = 1.05;
    friend bool operator==(const Diagram&, const Diagram&) = default;
  } diagram;

  struct Output {
    std::string dir = "out";
    ProfileMode profiles = ProfileMode::sparse;
    int sparse_stride = 10;
    friend bool operator==(const Output&, const Output&) = default;
  } output;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Problem parameters with lambda resolved and b left at zero.
  ProblemParams base_params() const;
  GammaOptions gamma_options() const;
  TimeMapOptions timemap_options() const;
  SolverOptions solver_options() const;
  OracleOptions oracle_options() const;
  SweepOptions sweep_options() const;
  /// Profile stride of solution exports; 0 drops the profiles.
  int profile_stride() const;

  /// Throws ConfigError.
  void validate() const;
};

/// Throws ConfigError on syntax errors, unknown keys or invalid values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a of the canonical serialization, output directory excluded.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace indefbif
