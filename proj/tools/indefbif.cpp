// Command-line front end. Every subcommand writes its artifacts and a
// manifest.json into the output directory.
//
// Exit status: 0 success, 1 numerical failure (invariant violation or a
// failed acceptance check), 2 configuration or usage error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "indefbif/config.hpp"
#include "indefbif/error.hpp"
#include "indefbif/kernels.hpp"
#include "indefbif/parallel.hpp"
#include "indefbif/verify.hpp"

#ifndef INDEFBIF_VERSION
#define INDEFBIF_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace indefbif;
using nlohmann::ordered_json;

namespace {

struct Flags {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::optional<double> b;
  std::optional<double> nu;
  std::string profiles;
};

class Run {
 public:
  Run(std::string command, RunConfig cfg, const Flags& flags)
      : command_(std::move(command)), cfg_(std::move(cfg)), flags_(flags) {
    base_ = cfg_.base_params();
  }

  int execute();

 private:
  template <class F>
  auto stage(const std::string& name, F&& f) {
    std::fprintf(stderr, "[%s] %s\n", command_.c_str(), name.c_str());
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      stages_.push_back({name, elapsed(t0)});
    } else {
      auto r = f();
      stages_.push_back({name, elapsed(t0)});
      return r;
    }
  }

  static double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = fs::path(cfg_.output.dir) / name;
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    files_.push_back(name);
    return os;
  }

  const DiagramContext& ctx() {
    if (!ctx_) {
      ctx_ = stage("boundary curves", [&] {
        return std::make_unique<DiagramContext>(base_, cfg_.gamma_options());
      });
    }
    return *ctx_;
  }

  double run_b() {
    const double b = cfg_.problem.b ? *cfg_.problem.b : cfg_.problem.b_rel * ctx().b_star();
    return b;
  }

  int gamma();
  int phase();
  int timemap();
  int solve();
  int bifpoint();
  int diagram();
  int verify();
  void write_manifest(int status);

  std::string command_;
  RunConfig cfg_;
  Flags flags_;
  ProblemParams base_;
  std::unique_ptr<DiagramContext> ctx_;
  std::vector<std::pair<std::string, double>> stages_;
  std::vector<std::string> files_;
  ordered_json extra_ = ordered_json::object();
};

int Run::gamma() {
  const auto& c = ctx();
  auto g0 = open("gamma0.csv");
  c.gamma0().write_csv(g0);
  auto g1 = open("gamma1.csv");
  c.gamma1().write_csv(g1);
  extra_["gamma0_samples"] = c.gamma0().samples().size();
  extra_["gamma1_samples"] = c.gamma1().samples().size();
  return 0;
}

int Run::phase() {
  const double b = run_b();
  const Well w(b, base_.lambda, base_.p);
  const int n = cfg_.phase.points;
  auto os = open("phase.csv");
  os << "curve,index,u,v\n";
  char buf[128];
  const auto row = [&](const char* curve, int idx, double u, double v) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g\n", curve, idx, u, v);
    os << buf;
  };
  row("equilibrium", 0, 0.0, 0.0);
  row("equilibrium", 1, w.center(), 0.0);
  // level curves sampled in u with cosine spacing toward the turning points
  const auto level = [&](const char* curve, int idx, double E) {
    const TurningPoints tp = turning_points(w, E, true);
    const double lo = tp.open ? 0.0 : tp.x_m;
    for (int sign : {+1, -1}) {
      for (int i = 0; i <= n; ++i) {
        const double s = sign > 0 ? i : n - i;
        const double u = lo + (tp.x_M - lo) * 0.5 * (1.0 - std::cos(M_PI * s / n));
        const double v2 = std::max(0.0, E - w.phi(u));
        row(curve, idx, u, sign * std::sqrt(v2));
      }
    }
  };
  stage("phase portrait", [&] {
    level("homoclinic", 0, 0.0);
    const double e_c = w.center_energy();
    for (int k = 1; k <= cfg_.phase.orbits; ++k)
      level("orbit", k, e_c * (1.0 - static_cast<double>(k) / (cfg_.phase.orbits + 1)));
  });
  extra_["b"] = b;
  extra_["center"] = w.center();
  extra_["homoclinic_extent"] = homoclinic_extent(b, base_.lambda, base_.p);
  return 0;
}

int Run::timemap() {
  const double b = run_b();
  const auto& c = ctx();
  const TimeMaps tm(c.gamma0(), c.gamma1(), b, cfg_.timemap_options());
  std::vector<TimeMapSample> out;
  stage("time maps", [&] {
    const double hi = std::min(cfg_.timemap.x_max_rel * c.gamma0().m0(), c.gamma0().x_max());
    const int n = cfg_.timemap.n_x;
    for (int i = 1; i <= n; ++i) {
      const double x = hi * i / n;
      try {
        const PhaseSlice s = tm.slice(x);
        for (int j = 1; j <= cfg_.timemap.j_max; ++j) {
          try {
            TimeMapSample t;
            t.x = x;
            t.j = j;
            t.value = s.tau(j);
            t.kind = MapKind::tau;
            t.E = s.E;
            out.push_back(t);
          } catch (const NotReachableError&) {
          }
        }
        if (!s.open) out.push_back(tm.period_at(x));
        if (tm.symmetric() && !s.open && s.hits_per_turn() >= 2) {
          out.push_back(tm.theta(x, 1));
          out.push_back(tm.theta(x, 2));
        }
      } catch (const DomainError&) {
        // x outside the range where the orbit is defined
      }
    }
  });
  auto os = open("timemap.csv");
  write_timemap_csv(os, out);
  extra_["b"] = b;
  extra_["samples"] = out.size();
  extra_["x_t"] = tm.tangency0().x_t;
  return 0;
}

int Run::solve() {
  const double b = run_b();
  const auto& c = ctx();
  const auto sols = stage("solve", [&] { return solve_at(b, c.gamma0(), c.gamma1(), cfg_.solver_options()); });
  auto os = open("solutions.json");
  write_solutions_json(os, sols, cfg_.profile_stride());
  int suspect = 0;
  for (const auto& s : sols) suspect += s.suspect ? 1 : 0;
  extra_["b"] = b;
  extra_["solutions"] = sols.size();
  extra_["suspect"] = suspect;
  std::fprintf(stderr, "[solve] %zu solutions at b = %.17g (%d suspect)\n", sols.size(), b, suspect);
  return suspect == 0 ? 0 : 1;
}

int Run::bifpoint() {
  const auto& c = ctx();
  if (!c.params().symmetric()) throw ConfigError("bifpoint needs nu = 1");
  BifurcationReport rep;
  rep.b_star = c.b_star();
  rep.b_h = c.b_h();
  const int i = cfg_.diagram.loop;
  const auto plus = stage("bifurcation point +", [&] { return find_bifurcation_point(c, i, +1); });
  rep.b_points.push_back({i, +1, plus.b});
  if (cfg_.diagram.minus_side) {
    const auto minus = stage("bifurcation point -", [&] { return find_bifurcation_point(c, i, -1); });
    rep.b_points.push_back({i, -1, minus.b});
  }
  const auto cls = stage("classification", [&] { return classify_nu1_point(c, plus.b); });
  rep.nu_one_type = cls.type;
  rep.notes.push_back(cls.detail);
  auto os = open("report.json");
  write_report_json(os, rep);
  extra_["b_b"] = plus.b;
  return 0;
}

int Run::diagram() {
  const auto& c = ctx();
  const double bs = c.b_star();
  const Diagram d = stage("sweep", [&] {
    return sweep(c, cfg_.diagram.b_lo_rel * bs, cfg_.diagram.b_hi_rel * bs, cfg_.sweep_options());
  });
  {
    auto os = open("diagram.csv");
    write_diagram_csv(os, d);
  }
  BifurcationReport rep;
  rep.b_star = bs;
  rep.b_h = c.b_h();
  rep.turning_points = d.turning_points;
  rep.components = d.components;
  rep.notes = d.notes;
  if (c.params().symmetric()) {
    const int i = cfg_.diagram.loop;
    const auto plus = stage("bifurcation point +", [&] { return find_bifurcation_point(c, i, +1); });
    rep.b_points.push_back({i, +1, plus.b});
    if (cfg_.diagram.minus_side) {
      const auto minus =
          stage("bifurcation point -", [&] { return find_bifurcation_point(c, i, -1); });
      rep.b_points.push_back({i, -1, minus.b});
    }
    const auto cls = stage("classification", [&] { return classify_nu1_point(c, plus.b); });
    rep.nu_one_type = cls.type;
    if (cfg_.diagram.imperfect) {
      ImperfectOptions io;
      io.nu_start = cfg_.diagram.nu_start;
      io.sweep = cfg_.sweep_options();
      rep.imperfect = stage("imperfect bifurcation", [&] { return imperfect_analysis(c, plus.b, cls, io); });
    }
  } else {
    rep.notes.push_back("bifurcation points and classification need nu = 1; sweep only");
  }
  auto os = open("report.json");
  write_report_json(os, rep);
  extra_["levels"] = d.levels.size();
  extra_["points"] = d.points.size();
  extra_["branches"] = d.branches;
  extra_["components"] = d.components;
  extra_["ambiguous_links"] = d.ambiguous_b.size();
  return 0;
}

int Run::verify() {
  VerifyOptions opt;
  opt.on_result = [](const CheckResult& r) {
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
  };
  const auto results = stage("acceptance", [&] { return run_acceptance(cfg_, opt); });
  int failed = 0;
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    failed += r.pass ? 0 : 1;
    arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  std::printf("%d/%zu acceptance checks passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  auto os = open("verify.json");
  os << arr.dump(2) << "\n";
  return failed == 0 ? 0 : 1;
}

void Run::write_manifest(int status) {
  ordered_json m;
  m["tool"] = "indefbif";
  m["version"] = INDEFBIF_VERSION;
  m["command"] = command_;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg_)));
  m["config_hash"] = hash;
  m["config"] = serialize_config(cfg_);
  m["threads"] = thread_count();
  m["kernels"] = std::string(kernels::isa_name(kernels::active_isa()));
  ordered_json d;
  d["lambda"] = base_.lambda;
  ordered_json lam = ordered_json::array();
  for (int j = 1; j <= 3; ++j) lam.push_back(lambda_threshold(j, base_.p, base_.alpha));
  d["lambda_j"] = lam;
  d["small_oscillation_period"] = small_oscillation_period(base_.lambda, base_.p);
  if (ctx_) {
    const double bs = ctx_->b_star();
    d["m0"] = ctx_->gamma0().m0();
    d["b_star"] = bs;
    d["center_at_b_star"] = center_abscissa(bs, base_.lambda, base_.p);
    d["b_h"] = ctx_->b_h();
    ordered_json xt = ordered_json::array();
    for (double f : {1.1, 1.3, 1.6}) {
      const TimeMaps tm(ctx_->gamma0(), ctx_->gamma1(), f * bs);
      xt.push_back({{"b", f * bs}, {"x_t", tm.tangency0().x_t}});
    }
    d["x_t"] = xt;
  }
  m["derived"] = d;
  m["results"] = extra_;
  m["files"] = files_;
  ordered_json st = ordered_json::object();
  for (const auto& [name, sec] : stages_) st[name] = sec;
  m["stage_seconds"] = st;
  m["exit_status"] = status;
  const fs::path p = fs::path(cfg_.output.dir) / "manifest.json";
  std::ofstream os(p);
  os << m.dump(2) << "\n";
}

int Run::execute() {
  fs::create_directories(cfg_.output.dir);
  int status = 0;
  if (command_ == "gamma") status = gamma();
  else if (command_ == "phase") status = phase();
  else if (command_ == "timemap") status = timemap();
  else if (command_ == "solve") status = solve();
  else if (command_ == "bifpoint") status = bifpoint();
  else if (command_ == "diagram") status = diagram();
  else if (command_ == "verify") status = verify();
  write_manifest(status);
  return status;
}

RunConfig resolve_config(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (const char* env = std::getenv("INDEFBIF_OUT"); env && *env) cfg.output.dir = env;
  if (!f.out.empty()) cfg.output.dir = f.out;
  if (f.b) {
    cfg.problem.b = *f.b;
    cfg.problem.b_rel = 1.0;
  }
  if (f.nu) cfg.problem.nu = *f.nu;
  if (!f.profiles.empty()) cfg.output.profiles = parse_profile_mode(f.profiles);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive solutions and bifurcation diagrams of -u'' = lambda u + a(t) u^p"};
  app.set_version_flag("--version", INDEFBIF_VERSION);
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "INI run configuration (reference problem if omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "output directory (overrides config and INDEFBIF_OUT)");
  app.add_option("--threads", flags.threads, "worker thread cap, 0 = all cores");
  app.add_option("--b", flags.b, "weight b of single-point runs");
  app.add_option("--nu", flags.nu, "ratio nu of the right absorption");
  app.add_option("--profiles", flags.profiles, "solution profiles in solutions.json")
      ->check(CLI::IsMember({"full", "sparse", "none"}));

  const std::vector<std::pair<const char*, const char*>> commands{
      {"gamma", "build and export the boundary curves"},
      {"phase", "export equilibria, homoclinic and closed orbits at b"},
      {"timemap", "export time maps on an x grid at b"},
      {"solve", "solution set at one (b, nu)"},
      {"bifpoint", "locate and classify the bifurcation point"},
      {"diagram", "sweep b, assemble branches, write the report"},
      {"verify", "run the acceptance suite"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    set_thread_count(flags.threads);
    const RunConfig cfg = resolve_config(flags);
    Run run(app.get_subcommands().front()->get_name(), cfg, flags);
    return run.execute();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}
