#pragma once

#include <string>

#include <json.hpp>

#include "relmod/problem.hpp"

namespace relmod {

struct RunOptions {
  bool strict = false;
  bool with_timestamp = true;
  double tol = 1e-8;        // route-agreement tolerance in the report
  double group_tol = kGroupTol;
  double support_eta = kSupportEta;
};

struct RunOutcome {
  nlohmann::json report;
  bool sentinel = false;  // any +-inf surfaced anywhere in the report
};

// Runs every task of the requested kind (entropy/quasi/renyi) in file order.
// Throws ProblemError with task attribution on computation failure, or if the
// file holds no task of that kind.
RunOutcome run_report(const ProblemFile& problem, TaskSpec::Kind kind,
                      const RunOptions& options);

// +-inf values are not representable in the output format; they are written as
// the strings "+inf" / "-inf".
nlohmann::json json_number(double v);

std::string utc_timestamp();

}  // namespace relmod
