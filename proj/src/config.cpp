#include "indefbif/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "indefbif/error.hpp"

namespace indefbif {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v))
    throw ConfigError(key + ": expected a finite number, got '" + s + "'");
  return v;
}

int to_int(const std::string& key, const std::string& s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

#define NUM(sec, name, member)                                                            \
  Field {                                                                                 \
    sec, name, [](RunConfig& c, const std::string& v) { c.member = to_double(name, v); }, \
        [](const RunConfig& c) -> std::optional<std::string> { return fmt(c.member); }    \
  }
#define INT(sec, name, member)                                                            \
  Field {                                                                                 \
    sec, name, [](RunConfig& c, const std::string& v) { c.member = to_int(name, v); },    \
        [](const RunConfig& c) -> std::optional<std::string> {                            \
          return std::to_string(c.member);                                                \
        }                                                                                 \
  }
#define BOOL(sec, name, member)                                                           \
  Field {                                                                                 \
    sec, name, [](RunConfig& c, const std::string& v) { c.member = to_bool(name, v); },   \
        [](const RunConfig& c) -> std::optional<std::string> {                            \
          return c.member ? "true" : "false";                                             \
        }                                                                                 \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      Field{"problem", "lambda",
            [](RunConfig& c, const std::string& v) {
              c.problem.lambda = to_double("lambda", v);
              c.problem.lambda_between.reset();
            },
            [](const RunConfig& c) -> std::optional<std::string> {
              if (!c.problem.lambda) return std::nullopt;
              return fmt(*c.problem.lambda);
            }},
      Field{"problem", "lambda_between",
            [](RunConfig& c, const std::string& v) {
              c.problem.lambda_between = to_int("lambda_between", v);
              c.problem.lambda.reset();
            },
            [](const RunConfig& c) -> std::optional<std::string> {
              if (!c.problem.lambda_between) return std::nullopt;
              return std::to_string(*c.problem.lambda_between);
            }},
      NUM("problem", "p", problem.p),
      NUM("problem", "alpha", problem.alpha),
      NUM("problem", "c", problem.c),
      NUM("problem", "nu", problem.nu),
      NUM("problem", "M", problem.M),
      Field{"problem", "b",
            [](RunConfig& c, const std::string& v) { c.problem.b = to_double("b", v); },
            [](const RunConfig& c) -> std::optional<std::string> {
              if (!c.problem.b) return std::nullopt;
              return fmt(*c.problem.b);
            }},
      NUM("problem", "b_rel", problem.b_rel),
      NUM("ode", "rel_tol", ode.rel_tol),
      NUM("ode", "abs_tol", ode.abs_tol),
      Field{"ode", "max_steps",
            [](RunConfig& c, const std::string& v) { c.ode.max_steps = to_int("max_steps", v); },
            [](const RunConfig& c) -> std::optional<std::string> {
              return std::to_string(c.ode.max_steps);
            }},
      NUM("gamma", "x_resolution", gamma.x_resolution),
      NUM("gamma", "x_max_factor", gamma.x_max_factor),
      NUM("gamma", "interp_tol", gamma.interp_tol),
      INT("phase", "orbits", phase.orbits),
      INT("phase", "points", phase.points),
      NUM("timemap", "quad_tol", timemap.quad_tol),
      INT("timemap", "n_x", timemap.n_x),
      NUM("timemap", "x_max_rel", timemap.x_max_rel),
      INT("timemap", "j_max", timemap.j_max),
      INT("solver", "grid_per_segment", solver.grid_per_segment),
      NUM("solver", "map_residual", solver.map_residual),
      NUM("solver", "residual_tol", solver.residual_tol),
      NUM("solver", "stitch_tol", solver.stitch_tol),
      NUM("solver", "polish_tol", solver.polish_tol),
      INT("solver", "profile_points", solver.profile_points),
      INT("oracle", "n_scan", oracle.n_scan),
      NUM("diagram", "b_lo_rel", diagram.b_lo_rel),
      NUM("diagram", "b_hi_rel", diagram.b_hi_rel),
      INT("diagram", "n_b", diagram.n_b),
      NUM("diagram", "b_tol", diagram.b_tol),
      NUM("diagram", "ratio", diagram.ratio),
      INT("diagram", "max_levels", diagram.max_levels),
      INT("diagram", "loop", diagram.loop),
      BOOL("diagram", "minus_side", diagram.minus_side),
      BOOL("diagram", "imperfect", diagram.imperfect),
      NUM("diagram", "nu_start", diagram.nu_start),
      Field{"output", "dir",
            [](RunConfig& c, const std::string& v) {
              if (v.empty()) throw ConfigError("dir: must not be empty");
              c.output.dir = v;
            },
            [](const RunConfig& c) -> std::optional<std::string> { return c.output.dir; }},
      Field{"output", "profiles",
            [](RunConfig& c, const std::string& v) { c.output.profiles = parse_profile_mode(v); },
            [](const RunConfig& c) -> std::optional<std::string> {
              return profile_mode_name(c.output.profiles);
            }},
      INT("output", "sparse_stride", output.sparse_stride),
  };
  return f;
}

#undef NUM
#undef INT
#undef BOOL

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

std::string profile_mode_name(ProfileMode m) {
  switch (m) {
    case ProfileMode::full: return "full";
    case ProfileMode::sparse: return "sparse";
    case ProfileMode::none: return "none";
  }
  return "none";
}

ProfileMode parse_profile_mode(const std::string& s) {
  if (s == "full") return ProfileMode::full;
  if (s == "sparse") return ProfileMode::sparse;
  if (s == "none") return ProfileMode::none;
  throw ConfigError("profiles: expected full, sparse or none, got '" + s + "'");
}

ProblemParams RunConfig::base_params() const {
  ProblemParams pr;
  pr.p = problem.p;
  pr.alpha = problem.alpha;
  pr.c = problem.c;
  pr.nu = problem.nu;
  pr.M = problem.M;
  if (problem.lambda) {
    pr.lambda = *problem.lambda;
  } else {
    const int k = *problem.lambda_between;
    pr.lambda = 0.5 * (lambda_threshold(k, pr.p, pr.alpha) + lambda_threshold(k + 1, pr.p, pr.alpha));
  }
  return pr;
}

GammaOptions RunConfig::gamma_options() const {
  GammaOptions g;
  g.x_resolution = gamma.x_resolution;
  g.x_max_factor = gamma.x_max_factor;
  g.interp_tol = gamma.interp_tol;
  g.ode = ode;
  return g;
}

TimeMapOptions RunConfig::timemap_options() const {
  TimeMapOptions t;
  t.quad_tol = timemap.quad_tol;
  return t;
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions s;
  s.grid_per_segment = solver.grid_per_segment;
  s.map_residual = solver.map_residual;
  s.residual_tol = solver.residual_tol;
  s.stitch_tol = solver.stitch_tol;
  s.polish_tol = solver.polish_tol;
  s.profile_points = solver.profile_points;
  return s;
}

OracleOptions RunConfig::oracle_options() const {
  OracleOptions o;
  o.n_scan = oracle.n_scan;
  o.profile_points = solver.profile_points;
  return o;
}

SweepOptions RunConfig::sweep_options() const {
  SweepOptions s;
  s.n_b = diagram.n_b;
  s.b_tol = diagram.b_tol;
  s.ratio = diagram.ratio;
  s.max_levels = diagram.max_levels;
  s.solver = solver_options();
  return s;
}

int RunConfig::profile_stride() const {
  switch (output.profiles) {
    case ProfileMode::full: return 1;
    case ProfileMode::sparse: return output.sparse_stride;
    case ProfileMode::none: return 0;
  }
  return 0;
}

void RunConfig::validate() const {
  require(problem.lambda.has_value() != problem.lambda_between.has_value(),
          "exactly one of lambda and lambda_between must be set");
  if (problem.lambda_between)
    require(*problem.lambda_between >= 1, "lambda_between must be at least 1");
  if (problem.b) require(*problem.b > 0.0, "b must be positive");
  require(problem.b_rel > 0.0, "b_rel must be positive");
  try {
    base_params().validate();
    ode.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  require(gamma.x_resolution >= 0.0, "x_resolution must be nonnegative");
  require(gamma.x_max_factor > 1.0, "x_max_factor must exceed 1");
  require(gamma.interp_tol > 0.0, "interp_tol must be positive");
  require(phase.orbits >= 1 && phase.points >= 8, "phase needs orbits >= 1 and points >= 8");
  require(timemap.quad_tol > 0.0, "quad_tol must be positive");
  require(timemap.n_x >= 2, "n_x must be at least 2");
  require(timemap.x_max_rel > 0.0, "x_max_rel must be positive");
  require(timemap.j_max >= 1, "j_max must be at least 1");
  require(solver.grid_per_segment >= 4, "grid_per_segment must be at least 4");
  require(solver.map_residual > 0.0 && solver.residual_tol > 0.0 && solver.stitch_tol > 0.0 &&
              solver.polish_tol > 0.0,
          "solver tolerances must be positive");
  require(solver.profile_points >= 2, "profile_points must be at least 2");
  require(oracle.n_scan >= 16, "n_scan must be at least 16");
  require(diagram.b_lo_rel > 0.0 && diagram.b_lo_rel < diagram.b_hi_rel,
          "diagram range needs 0 < b_lo_rel < b_hi_rel");
  require(diagram.n_b >= 2, "n_b must be at least 2");
  require(diagram.b_tol > 0.0, "b_tol must be positive");
  require(diagram.ratio > 0.0 && diagram.ratio < 1.0, "ratio must lie in (0, 1)");
  require(diagram.max_levels >= diagram.n_b, "max_levels must be at least n_b");
  require(diagram.loop >= 1, "loop must be at least 1");
  require(diagram.nu_start > 1.0, "nu_start must exceed 1");
  require(output.sparse_stride >= 1, "sparse_stride must be at least 1");
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  RunConfig cfg;
  std::set<std::string> seen;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("empty section or key outside a section: " + section);
    for (const auto& [key, value] : body) {
      const Field* field = nullptr;
      for (const auto& f : fields())
        if (section == f.section && key == f.key) field = &f;
      if (!field) throw ConfigError("unknown key " + section + "." + key);
      field->set(cfg, value.data());
      seen.insert(section + "." + key);
    }
  }
  if (seen.count("problem.lambda") && seen.count("problem.lambda_between"))
    throw ConfigError("lambda and lambda_between are mutually exclusive");
  if (seen.count("problem.b") && seen.count("problem.b_rel"))
    throw ConfigError("b and b_rel are mutually exclusive");
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  std::string current;
  for (const auto& f : fields()) {
    const auto v = f.get(cfg);
    if (!v) continue;
    if (f.section != current) {
      if (!current.empty()) out += "\n";
      current = f.section;
      out += "[" + current + "]\n";
    }
    // b and b_rel are exclusive on input; the canonical form keeps b only.
    if (cfg.problem.b && current == "problem" && std::string(f.key) == "b_rel") continue;
    out += std::string(f.key) + " = " + *v + "\n";
  }
  return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // where the artifacts go does not change them
  RunConfig c = cfg;
  c.output.dir = "-";
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace indefbif
