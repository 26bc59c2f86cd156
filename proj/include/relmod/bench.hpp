#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "relmod/algebra.hpp"
#include "relmod/modular.hpp"

namespace relmod {

struct BenchOptions {
  std::uint64_t seed = 42;
  std::vector<AlgebraShape> shapes;
  int reps = 5;
  int oracle_cap = kOracleCap;
};

struct BenchRow {
  std::string shape;
  std::string route;  // "pairing" or "dense"
  int reps = 0;
  double median_ms = 0.0;
  double residual = 0.0;  // max eigenvalue gap between the two routes
  bool valid = false;     // residual within 1e-9 of the cross-route oracle
  std::string note;
};

// Times both realizations of the relative modular spectrum on one random pair
// per shape. Throws when a shape's dense dimension exceeds the cap.
std::vector<BenchRow> run_bench(const BenchOptions& options);

nlohmann::json bench_report(const std::vector<BenchRow>& rows, const BenchOptions& options,
                            bool with_timestamp);

}  // namespace relmod
