// Acceptance suite: runs every named experiment at its reference parameters
// and prints one [PASS]/[FAIL] line per acceptance criterion. Exit status is
// the number of failing criteria.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "wmlab/experiments.hpp"

using namespace wmlab;

namespace {

int failures = 0;

void report_line(const std::string& tag, const Criterion& c, double secs) {
  std::printf("[%s] %-42s measured=%-12.5g threshold=%-10.5g (%.1fs)\n",
              c.pass ? "PASS" : "FAIL", (tag + " " + c.id).c_str(), c.measured,
              c.threshold, secs);
  if (!c.pass) ++failures;
}

void run_experiment(const std::string& tag, const std::string& name,
                    nlohmann::json params = nlohmann::json::object()) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto rep = run(validate_config(name, params));
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    for (const auto& c : rep.criteria) report_line(tag, c, secs);
  } catch (const std::exception& e) {
    std::printf("[FAIL] %-42s exception: %s\n", tag.c_str(), e.what());
    ++failures;
  }
}

}  // namespace

int main() {
  std::printf("wmlab acceptance suite (%s)\n", kVersion);

  // 1. DFT round trip and Parseval
  run_experiment("C1", "dft-roundtrip");

  // 2. A_p duality identity over identical candidate families
  run_experiment("C2", "ap-duality");

  // 3. characteristic vs >= 1e5-random-interval brute force
  run_experiment("C3", "ap-oracle");

  // 4. Hilbert transform: quadrature vs multiplier; L2 norm = pi
  run_experiment("C4", "hilbert-consistency", {{"N", 4096}, {"L", 40.0}});

  // 5. Littlewood-Paley reconstruction on the blocking family
  run_experiment("C5", "lp-reconstruct", {{"N", 128}});

  // 6. blocking identity: E_k = union over J_k, node-exact
  run_experiment("C6", "blocking-identity", {{"l_min", -2}, {"l_max", 2}});

  // 7 + 8. unconditionality: exhaustive signs at p=2, weighted stability
  run_experiment("C7+C8", "lp-unconditionality",
                 {{"ladder", {512, 1024, 2048}}});

  // 9. Kurtz iff probe, both directions
  run_experiment("C9", "kurtz-iff");

  // 10. Mikhlin norms: sgn exactly 1; resolvent diag(1,2) within 1e-3
  run_experiment("C10", "mikhlin-check");

  // 11. uniformly R-bounded variation measure norm 2 + log 2
  run_experiment("C11", "rbdd-variation");

  // 12. partition of unity and kernel spectral consistency
  run_experiment("C12", "partition-unity");

  // 13. p-Hoermander kernel sums, stability under 2x refinement
  run_experiment("C13", "p-hormander");

  // 14. sparse machinery: exact eta checks, operator oracle, domination
  run_experiment("C14", "sparse-dominate", {{"ladder", {1024, 2048}}});

  // 15. sparse weighted bound uniformity and the A_p^r reduction
  run_experiment("C15", "sparse-weighted");

  // 16. maximal regularity demo
  run_experiment("C16", "maxreg");

  // 17. anisotropic homogeneity and unit-vector coincidence
  run_experiment("C17", "aniso-homogeneity");

  std::printf("%s: %d criterion(s) failed\n",
              failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures;
}
