#pragma once

#include <cstdint>
#include <random>

#include "relmod/algebra.hpp"

namespace relmod {

// Deterministic random source. The transforms below are fixed arithmetic over
// raw mt19937_64 output; std::uniform_real_distribution and friends are
// implementation-defined and would break byte-identical reports.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal();  // Box-Muller
  Complex cnormal() { return {normal(), normal()}; }

 private:
  std::mt19937_64 eng_;
};

// Stream splitting for order-independent seeding (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

Element random_element(const AlgebraShape& shape, Rng& rng);    // iid complex gaussian entries
Element random_hermitian(const AlgebraShape& shape, Rng& rng);  // (A + A*)/2
Element random_positive(const AlgebraShape& shape, Rng& rng);   // A A*, full rank a.s.
Element random_unitary(const AlgebraShape& shape, Rng& rng);    // QR phase of a gaussian
Element random_projection(const AlgebraShape& shape, const std::vector<int>& ranks, Rng& rng);

// Faithful state with mass of order 1, not normalized.
State random_state(const AlgebraShape& shape, Rng& rng);
State random_state_normalized(const AlgebraShape& shape, Rng& rng);
// Rank-deficient density: at least one block loses rank (when its dimension
// allows), the total stays nonzero.
State random_degenerate_state(const AlgebraShape& shape, Rng& rng);
// Density supported inside s(phi), occasionally on a strictly smaller
// subspace, so that s(omega) <= s(phi) by construction.
State random_dominated_state(const State& phi, Rng& rng);

}  // namespace relmod
