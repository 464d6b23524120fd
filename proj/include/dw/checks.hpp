#pragma once
// Built-in invariant suite: Clifford identities, rotor identities,
// Fourier-diagram round trips, the exponential oracle and the
// classical diagonalization check.

#include <ostream>
#include <string>
#include <vector>

namespace dw {

struct CheckResult {
  std::string name;
  double value = 0.0;      // worst residue observed
  double tolerance = 0.0;  // pass when value <= tolerance
  double seconds = 0.0;
  bool passed() const { return value <= tolerance; }
};

CheckResult check_clifford();             // exact: tolerance 0
CheckResult check_rotors(int samples = 100);
CheckResult check_diagonalization(int samples = 100);
CheckResult check_round_trips(int n = 64);
CheckResult check_exponentials(int samples = 1000);

std::vector<CheckResult> run_checks();

/// One line per check; returns true when all pass.
bool report_checks(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace dw
