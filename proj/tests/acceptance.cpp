// Acceptance suite on the reference configuration: one line per check,
// exit status 0 only when every check passes.

#include <cstdio>

#include "indefbif/verify.hpp"

int main() {
  indefbif::VerifyOptions opt;
  opt.on_result = [](const indefbif::CheckResult& r) {
    std::printf("%s\n", indefbif::format_result(r).c_str());
    std::fflush(stdout);
  };
  const auto results = indefbif::run_acceptance(indefbif::RunConfig{}, opt);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::printf("%d/%zu acceptance checks passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  return failed == 0 ? 0 : 1;
}
