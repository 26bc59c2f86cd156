#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "helpers.hpp"
#include "relmod/entropy.hpp"

using namespace relmod;
using testutil::rel_diff;

namespace {

// diag(3/4, 1/4) against the tracial state diag(1/2, 1/2) on one 2x2 block.
struct CommutingPair {
  AlgebraShape shape{std::vector<int>{2}, std::vector<double>{1.0}};
  State phi{Element::diagonal(shape, {{0.75, 0.25}})};
  State omega{Element::diagonal(shape, {{0.5, 0.5}})};
};

bool plus_inf(double v) { return std::isinf(v) && v > 0; }

}  // namespace

TEST_CASE("segal entropy against hand values") {
  CommutingPair cp;
  double want = 0.75 * std::log(0.75) + 0.25 * std::log(0.25);
  CHECK(std::abs(segal_entropy(cp.phi) - want) <= 1e-14);
  CHECK(std::abs(segal_entropy(cp.phi) - -0.5623351446188083) <= 1e-15);

  // tau-weight enters: w = 2 on a single 1x1 block with h = 1/2.
  AlgebraShape w({1}, {2.0});
  State half(Element::diagonal(w, {{0.5}}));
  CHECK(std::abs(segal_entropy(half) - -std::log(2.0)) <= 1e-15);

  // 0 log 0 contributes nothing.
  AlgebraShape s2({2}, {1.0});
  State degenerate(Element::diagonal(s2, {{1.0, 0.0}}));
  CHECK(segal_entropy(degenerate) == 0.0);
}

TEST_CASE("relative entropy of commuting densities reduces to the classical sum") {
  CommutingPair cp;
  double want = 0.5 * std::log(4.0 / 3.0);
  CHECK(std::abs(araki_relative_entropy(cp.phi, cp.omega) - want) <= 1e-12);

  double info = (-std::log(2.0)) - 0.5 * (std::log(0.75) + std::log(0.25));
  CHECK(std::abs(umegaki_information(cp.omega, cp.phi) - info) <= 1e-12);
  CHECK(std::abs(want - info) <= 1e-15);  // same quantity in the commuting case
}

TEST_CASE("non-commuting pair matches the hand-collapsed double sum") {
  AlgebraShape s({2}, {1.0});
  // Eigenprojections of phi sit at 45 degrees to those of omega, so every
  // cross trace tau(e_i f_j) equals 1/2 and the double sum collapses.
  State phi(Element(s, {(Matrix(2, 2) << 0.5, 0.25, 0.25, 0.5).finished()}));
  State omega(Element::diagonal(s, {{0.8, 0.2}}));

  double want = 0.8 * std::log(0.8) + 0.2 * std::log(0.2) - 0.5 * std::log(0.75 * 0.25);
  CHECK(std::abs(araki_relative_entropy(phi, omega) - want) <= 1e-12);
  CHECK(rel_diff(umegaki_information(omega, phi), want) <= 1e-12);
}

TEST_CASE("double sum over spectral projections is an independent oracle") {
  AlgebraShape s = testutil::two_blocks();
  Rng rng(31);
  State phi = random_state(s, rng);
  State omega = random_state(s, rng);

  SpectralDecomposition ep = phi.clipped_spectrum();
  SpectralDecomposition eo = omega.clipped_spectrum();
  double sum = 0;
  for (std::size_t j = 0; j < eo.eigenvalues.size(); ++j) {
    double beta = eo.eigenvalues[j];
    if (beta <= 0) continue;
    for (std::size_t i = 0; i < ep.eigenvalues.size(); ++i) {
      double alpha = ep.eigenvalues[i];
      REQUIRE(alpha > 0);  // random densities are faithful a.s.
      sum += beta * std::log(beta / alpha) * trace(ep.projections[i] * eo.projections[j]).real();
    }
  }
  CHECK(rel_diff(araki_relative_entropy(phi, omega), sum) <= 1e-10);
}

TEST_CASE("relative entropy of a state with itself vanishes") {
  AlgebraShape s = testutil::mixed_blocks();
  Rng rng(37);
  for (int t = 0; t < 5; ++t) {
    State h = random_state_normalized(s, rng);
    CHECK(std::abs(araki_relative_entropy(h, h)) <= 1e-10);
    CHECK(std::abs(umegaki_information(h, h)) <= 1e-10);
  }
}

TEST_CASE("support dominance gates the divergence sentinel") {
  AlgebraShape s({2}, {1.0});
  State phi(Element::diagonal(s, {{1.0, 0.0}}));
  State omega(Element::diagonal(s, {{0.5, 0.5}}));

  CHECK_FALSE(support_dominated(omega, phi));
  CHECK(support_dominated(phi, omega));
  CHECK(plus_inf(araki_relative_entropy(phi, omega)));
  CHECK(plus_inf(umegaki_information(omega, phi)));
  CHECK(plus_inf(quasi_entropy_generic(NegLog{}, Element::identity(s), phi, omega)));
  CHECK(plus_inf(quasi_entropy_closed(NegLog{}, Element::identity(s), phi, omega)));

  // Finite direction: the violating state in second position is harmless.
  CHECK(std::isfinite(araki_relative_entropy(omega, phi)));
}

TEST_CASE("renyi entropies against closed values") {
  CommutingPair cp;
  double overlap = std::sqrt(0.375) + std::sqrt(0.125);
  double want_half = -2.0 * std::log(overlap);
  CHECK(std::abs(renyi_relative_entropy(cp.omega, cp.phi, 0.5) - want_half) <= 1e-12);
  CHECK(std::abs(renyi_relative_entropy_spectral(cp.omega, cp.phi, 0.5) - want_half) <= 1e-12);

  // alpha = 0 sees only the support of omega.
  State small(Element::diagonal(cp.shape, {{0.5, 0.0}}));
  CHECK(std::abs(renyi_relative_entropy(small, cp.phi, 0.0) - -std::log(0.75)) <= 1e-12);

  // alpha > 1 is defined under dominance: tau(h_phi^{-1} h_omega^2) = 1/3.
  CHECK(std::abs(renyi_relative_entropy(small, cp.phi, 2.0) - std::log(1.0 / 3.0)) <= 1e-12);

  // Both routes on a non-commuting pair across the grid.
  AlgebraShape s = testutil::two_blocks();
  Rng rng(41);
  State phi = random_state_normalized(s, rng);
  State omega = random_state_normalized(s, rng);
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 0.9, 1.5}) {
    double closed = renyi_relative_entropy(omega, phi, alpha);
    double spectral = renyi_relative_entropy_spectral(omega, phi, alpha);
    CHECK(rel_diff(closed, spectral) <= 1e-10);
  }
}

TEST_CASE("renyi rejects bad exponents") {
  CommutingPair cp;
  CHECK_THROWS_AS(renyi_relative_entropy(cp.omega, cp.phi, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(renyi_relative_entropy(cp.omega, cp.phi, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(renyi_relative_entropy_spectral(cp.omega, cp.phi, 1.0), std::invalid_argument);

  // alpha > 1 without s(omega) <= s(phi) has no finite continuation.
  AlgebraShape s({2}, {1.0});
  State phi(Element::diagonal(s, {{1.0, 0.0}}));
  State omega(Element::diagonal(s, {{0.5, 0.5}}));
  CHECK_THROWS_AS(renyi_relative_entropy(omega, phi, 2.0), std::domain_error);
  CHECK_THROWS_AS(renyi_relative_entropy_spectral(omega, phi, 2.0), std::domain_error);

  // alpha in [0, 1) tolerates the violation and both routes still agree.
  double closed = renyi_relative_entropy(omega, phi, 0.5);
  double spectral = renyi_relative_entropy_spectral(omega, phi, 0.5);
  CHECK(std::isfinite(closed));
  CHECK(rel_diff(closed, spectral) <= 1e-10);
}

TEST_CASE("quasi entropies against hand values") {
  CommutingPair cp;
  Element id = Element::identity(cp.shape);

  // Power family at 1/2 is the square-root overlap.
  double overlap = std::sqrt(0.375) + std::sqrt(0.125);
  CHECK(std::abs(quasi_entropy_generic(PowerFamily{0.5}, id, cp.phi, cp.omega) - overlap) <=
        1e-12);
  CHECK(std::abs(quasi_entropy_closed(PowerFamily{0.5}, id, cp.phi, cp.omega) - overlap) <= 1e-12);

  // t log t reverses the roles of the densities.
  double tlogt = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
  CHECK(std::abs(quasi_entropy_generic(TLogT{}, id, cp.phi, cp.omega) - tlogt) <= 1e-12);
  CHECK(std::abs(quasi_entropy_closed(TLogT{}, id, cp.phi, cp.omega) - tlogt) <= 1e-12);

  // -log recovers the relative entropy for any pair, not just commuting ones.
  AlgebraShape s = testutil::two_blocks();
  Rng rng(43);
  State phi = random_state(s, rng);
  State omega = random_state(s, rng);
  CHECK(rel_diff(quasi_entropy_generic(NegLog{}, Element::identity(s), phi, omega),
                 araki_relative_entropy(phi, omega)) <= 1e-10);

  // Affine instance with k = sigma_x: <k xi|Delta k xi> = 1 and ||k xi||^2 = 1.
  Element sx(cp.shape, {(Matrix(2, 2) << 0, 1, 1, 0).finished()});
  CHECK(std::abs(quasi_entropy_generic(AffineFamily{2.0, -3.0}, sx, cp.phi, cp.omega) - -1.0) <=
        1e-12);
  CHECK(std::abs(quasi_entropy_closed(AffineFamily{2.0, -3.0}, sx, cp.phi, cp.omega) - -1.0) <=
        1e-12);
}

TEST_CASE("skew information at p = 1/2 is half the commutator norm") {
  AlgebraShape s = testutil::one_block3();
  Rng rng(47);
  State h = random_state(s, rng);
  Element k = random_hermitian(s, rng);

  Element root = h.sqrt();
  Element comm = root * k - k * root;
  double want = 0.5 * std::pow(p_norm(comm, 2.0), 2.0);

  double generic = quasi_entropy_generic(SkewFamily{0.5}, k, h, h);
  double closed = quasi_entropy_closed(SkewFamily{0.5}, k, h, h);
  CHECK(rel_diff(generic, want) <= 1e-10);
  CHECK(rel_diff(closed, want) <= 1e-10);

  CHECK_THROWS_AS(quasi_entropy_generic(SkewFamily{1.5}, k, h, h), std::invalid_argument);
}

TEST_CASE("trace commutation holds exactly on a nilpotent pair") {
  AlgebraShape s({2}, {1.0});
  Element x(s, {(Matrix(2, 2) << 0, 2, 0, 0).finished()});
  Element y(s, {(Matrix(2, 2) << 0, 0, 3, 0).finished()});
  TraceCommutation tc = trace_commutation_check(x, y, 2.0, 2.0);
  CHECK(std::abs(tc.lhs - Complex(6.0, 0.0)) <= 1e-15);
  CHECK(std::abs(tc.rhs - Complex(6.0, 0.0)) <= 1e-15);
  CHECK(tc.residual <= 1e-15);

  Rng rng(53);
  Element a = random_element(s, rng);
  Element b = random_element(s, rng);
  TraceCommutation rc = trace_commutation_check(a, b, 4.0, 4.0 / 3.0);
  CHECK(rc.residual <= 1e-12 * std::max(1.0, std::abs(rc.lhs)));
}

TEST_CASE("norm estimates on conjugated densities hold with hand equality cases") {
  AlgebraShape s({2}, {1.0});
  State phi(Element::diagonal(s, {{0.75, 0.25}}));
  State omega(Element::diagonal(s, {{0.5, 0.5}}));
  Element sx(s, {(Matrix(2, 2) << 0, 1, 1, 0).finished()});

  // s = 1/4: tau(w^{1/4} z* p^{1/2} z w^{1/4}) vs mass bounds, z a swap unitary.
  double lhs = trace(omega.power(0.25) * sx.adjoint() * phi.power(0.5) * sx * omega.power(0.25))
                   .real();
  double rhs = std::pow(phi.mass(), 0.5) * inf_norm(sx) * p_norm(sx * omega.sqrt(), 2.0);
  CHECK(std::abs(lhs - (std::sqrt(0.125) + std::sqrt(0.375))) <= 1e-14);
  CHECK(lhs <= rhs * (1.0 + 1e-9));

  // s = 1/2 collapses to tau(z* p z) and the bound is met with equality.
  double lhs2 = trace(omega.power(0.0) * sx.adjoint() * phi.density() * sx * omega.power(0.0))
                    .real();
  double rhs2 = std::pow(phi.mass(), 0.5) * inf_norm(sx) * p_norm(phi.sqrt() * sx, 2.0);
  CHECK(std::abs(lhs2 - 1.0) <= 1e-14);
  CHECK(std::abs(rhs2 - 1.0) <= 1e-14);
  CHECK(lhs2 <= rhs2 * (1.0 + 1e-9));
}

TEST_CASE("entropy report collects consistent values") {
  CommutingPair cp;
  std::vector<double> alphas{0.0, 0.25, 0.5, 0.75};
  std::vector<QuasiFamily> families{NegLog{}, PowerFamily{0.5}};

  EntropyReport rep =
      make_entropy_report(cp.phi, cp.omega, std::nullopt, alphas, families);
  CHECK(rep.support_dominance);
  CHECK(std::abs(rep.araki - 0.5 * std::log(4.0 / 3.0)) <= 1e-12);
  CHECK(rel_diff(rep.araki, rep.umegaki) <= 1e-10);
  CHECK(std::abs(rep.segal_omega - -std::log(2.0)) <= 1e-14);
  REQUIRE(rep.renyi.size() == alphas.size());
  CHECK(rep.renyi[2].first == 0.5);
  CHECK(std::abs(rep.renyi[2].second - -2.0 * std::log(std::sqrt(0.375) + std::sqrt(0.125))) <=
        1e-12);
  REQUIRE(rep.quasi.size() == 2);
  CHECK(rel_diff(rep.quasi[0].generic, rep.quasi[0].closed) <= 1e-10);
  CHECK(rel_diff(rep.quasi[1].generic, rep.quasi[1].closed) <= 1e-10);

  // The same state on both sides zeroes every relative quantity.
  EntropyReport self =
      make_entropy_report(cp.omega, cp.omega, std::nullopt, alphas, families);
  CHECK(std::abs(self.araki) <= 1e-10);
  CHECK(std::abs(self.umegaki) <= 1e-10);
  for (const auto& [alpha, value] : self.renyi) CHECK(std::abs(value) <= 1e-10);
}
