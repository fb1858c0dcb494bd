#pragma once

#include <string>
#include <vector>

namespace dbarlab {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Invariant suite behind the `selftest` subcommand: quadrature oracles,
// Green identities (including a sign-sensitivity guard), min-max
// monotonicities, exact dilation covariance, the Catlin bound, pencil
// brute-force equivalence, and serial-vs-parallel bit identity.
std::vector<CheckResult> run_selftest();

// One deterministic end-to-end computation serialized to text; used for the
// thread-count determinism check (byte-identical for any DBARLAB_THREADS).
std::string determinism_fingerprint();

void print_check_table(const std::vector<CheckResult>& results);
bool all_pass(const std::vector<CheckResult>& results);

}  // namespace dbarlab
