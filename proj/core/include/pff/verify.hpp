#pragma once

// Self-checks run by `pff verify`: finite-difference oracles for the
// constitutive layer and the assembled derivatives, plus a line-search bound.

#include <string>
#include <vector>

namespace pff {

struct CheckResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

std::vector<CheckResult> run_self_checks(unsigned seed = 12345);

}  // namespace pff
