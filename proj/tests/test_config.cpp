#include <doctest.h>

#include "indefbif/config.hpp"
#include "indefbif/error.hpp"

using namespace indefbif;

TEST_CASE("defaults describe the reference problem") {
  const RunConfig cfg = parse_config("[problem]\nnu = 1\n");
  const auto pr = cfg.base_params();
  CHECK(pr.p == 2.0);
  CHECK(pr.alpha == 0.25);
  CHECK(pr.c == 0.1);
  CHECK(pr.lambda == 0.5 * (lambda_threshold(1, 2.0, 0.25) + lambda_threshold(2, 2.0, 0.25)));
  CHECK(cfg.profile_stride() == 10);
}

TEST_CASE("parse, serialize, parse is the identity") {
  const char* text =
      "[problem]\nlambda = -55.5\nc = 0.08\nnu = 1.25\nb = 12345.678901234567\n"
      "[ode]\nrel_tol = 1e-11\n[diagram]\nn_b = 17\nimperfect = false\n"
      "[output]\ndir = runs/a\nprofiles = none\n";
  const RunConfig a = parse_config(text);
  const std::string s = serialize_config(a);
  const RunConfig b = parse_config(s);
  CHECK(a == b);
  CHECK(serialize_config(b) == s);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(*b.problem.b == 12345.678901234567);
  CHECK(!b.problem.lambda_between);
  CHECK(b.profile_stride() == 0);

  const RunConfig d;
  CHECK(parse_config(serialize_config(d)) == d);
}

TEST_CASE("hash ignores layout but not values") {
  const RunConfig a = parse_config("[problem]\nc = 0.1\n\n; comment\n[diagram]\nn_b = 48\n");
  const RunConfig b = parse_config("[diagram]\nn_b=48\n[problem]\nc=0.1\n");
  CHECK(config_hash(a) == config_hash(b));
  const RunConfig c = parse_config("[diagram]\nn_b = 96\n");
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(parse_config("[problem]\nlambada = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\nc = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\nc = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\nM = inf\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\nalpha = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\nlambda = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\nlambda = -50\nlambda_between = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\nb = 1\nb_rel = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[diagram]\nb_lo_rel = 2\nb_hi_rel = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[diagram]\nimperfect = yes\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[output]\nprofiles = most\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem\nc = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("c = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("output directory does not enter the hash") {
  RunConfig a, b;
  b.output.dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.output.profiles = ProfileMode::full;
  CHECK(config_hash(a) != config_hash(b));
}
