#pragma once

#include <cmath>
#include <cstdlib>
#include <string>

#include "relmod/algebra.hpp"
#include "relmod/gns.hpp"
#include "relmod/random.hpp"

namespace testutil {

using namespace relmod;

inline AlgebraShape one_block2() { return AlgebraShape({2}, {1.0}); }
inline AlgebraShape one_block3() { return AlgebraShape({3}, {1.0}); }
inline AlgebraShape two_blocks() { return AlgebraShape({2, 2}, {1.0, 0.5}); }
inline AlgebraShape mixed_blocks() { return AlgebraShape({1, 3}, {2.0, 0.5}); }

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(a));
}

inline double elem_diff(const Element& a, const Element& b) { return inf_norm(a - b); }

inline double vec_diff(const GnsVector& a, const GnsVector& b) {
  return norm(GnsVector{a.carrier - b.carrier});
}

// Path of the CLI binary / staged data files, exported by the test harness.
inline std::string env_or(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return v ? v : fallback;
}

}  // namespace testutil
