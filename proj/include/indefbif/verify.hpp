#pragma once

// Acceptance suite: ten pass/fail checks on the problem of a run
// configuration (the reference configuration by default). Each check
// measures what it states and reports the measured values in `detail`.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "indefbif/config.hpp"

namespace indefbif {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  unsigned seed = 20240611;
  /// Called as soon as a check finishes.
  std::function<void(const CheckResult&)> on_result;
  /// Run only these ids; empty runs all.
  std::vector<int> only;
};

std::vector<CheckResult> run_acceptance(const RunConfig& cfg, const VerifyOptions& opt = {});

/// "PASS  3  harmonic limit  (0.01 s)  detail" style line.
std::string format_result(const CheckResult& r);

}  // namespace indefbif
