#pragma once

#include <string>
#include <vector>

#include "fibersqueeze/split_step.hpp"

namespace fsq {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured error
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

/// Fast property suite on small grids: symplectic check, coherent F = 1,
/// forward/backprop agreement and soliton invariance. `fault` injects a
/// deliberate defect into every solver the suite builds.
std::vector<CheckResult> run_selftest(FaultInjection fault = FaultInjection::None);

FaultInjection fault_from_string(const std::string& name);
std::string to_string(FaultInjection fault);

}  // namespace fsq
