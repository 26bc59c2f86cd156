#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "relmod/algebra.hpp"
#include "relmod/modular.hpp"

namespace relmod {

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::vector<AlgebraShape> shapes;  // empty -> default desk shapes
  int trials = 25;
  int oracle_cap = kOracleCap;  // dense checks above this D are skipped, not run
};

std::vector<AlgebraShape> default_verify_shapes();

struct CheckResult {
  std::string name;
  int trials = 0;    // executed trials, summed over shapes
  int failures = 0;
  int skipped = 0;   // trials skipped (oracle cap), reported explicitly
  double max_residual = 0.0;
  std::string note;  // skip reasons and similar diagnostics
};

// Runs every invariant family over every shape; trials == 0 yields an empty
// summary. Deterministic: each (family, shape) pair draws from its own seeded
// stream, so results do not depend on evaluation order.
std::vector<CheckResult> run_verify(const VerifyOptions& options);

nlohmann::json verify_report(const std::vector<CheckResult>& results,
                             const VerifyOptions& options, bool with_timestamp);

int total_failures(const std::vector<CheckResult>& results);

}  // namespace relmod
