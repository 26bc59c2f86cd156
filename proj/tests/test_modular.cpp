#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "relmod/modular.hpp"

using namespace relmod;
using testutil::vec_diff;

namespace {

// phi = diag(3/4, 1/4), omega = I/2 on one 2x2 block: everything commutes and
// Delta acts as left diag(3/4, 1/4) times right diag(2, 2).
struct CommutingPair {
  AlgebraShape shape{std::vector<int>{2}, std::vector<double>{1.0}};
  State phi{Element::diagonal(shape, {{0.75, 0.25}})};
  State omega{Element::diagonal(shape, {{0.5, 0.5}})};
};

double max_abs_diff(const std::vector<double>& a, const Eigen::VectorXd& b) {
  if (static_cast<int>(a.size()) != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (int i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(a[i] - b(i)));
  return worst;
}

}  // namespace

TEST_CASE("commuting pair: spectrum and action by hand") {
  CommutingPair cp;
  RelativeModular delta = RelativeModular::build(cp.phi, cp.omega);

  std::vector<double> eigs = delta.eigenvalues();
  REQUIRE(eigs.size() == 4);
  std::vector<double> expected{0.5, 0.5, 1.5, 1.5};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(eigs[i] - expected[i]) <= 1e-14);

  GnsVector ones{Element(cp.shape, {(Matrix(2, 2) << 1, 1, 1, 1).finished()})};
  GnsVector image = delta.apply(ones);
  Element want(cp.shape, {(Matrix(2, 2) << 1.5, 1.5, 0.5, 0.5).finished()});
  CHECK(vec_diff(image, GnsVector{want}) <= 1e-14);

  // Delta^{1/2} multiplies by diag(sqrt(3/4), sqrt(1/4)) left, sqrt(2) right.
  Rng rng(3);
  GnsVector v{random_element(cp.shape, rng)};
  Element left = Element::diagonal(cp.shape, {{std::sqrt(0.75), std::sqrt(0.25)}});
  GnsVector direct{std::sqrt(2.0) * (left * v.carrier)};
  CHECK(vec_diff(delta.apply_power(0.5, v), direct) <= 1e-13 * std::max(1.0, norm(v)));
}

TEST_CASE("conjugation operator closes the polar identity") {
  CommutingPair cp;
  RelativeModular delta = RelativeModular::build(cp.phi, cp.omega);

  Element x(cp.shape, {(Matrix(2, 2) << 0, 1, 0, 0).finished()});
  GnsVector sv = s_operator_apply(cp.phi, cp.omega, x);
  Element want(cp.shape, {(Matrix(2, 2) << 0, 0, std::sqrt(0.75), 0).finished()});
  CHECK(vec_diff(sv, GnsVector{want}) <= 1e-14);

  // S = J Delta^{1/2} on Lambda(x h_omega^{1/2}).
  GnsVector arg{x * cp.omega.sqrt()};
  GnsVector via_polar = modular_j(delta.apply_power(0.5, arg));
  CHECK(vec_diff(sv, via_polar) <= 1e-13);
}

TEST_CASE("J is an exact antiunitary involution") {
  AlgebraShape s = testutil::two_blocks();
  Rng rng(17);
  GnsVector v{random_element(s, rng)};
  GnsVector u{random_element(s, rng)};

  CHECK(vec_diff(modular_j(modular_j(v)), v) == 0.0);

  Complex lhs = inner(modular_j(v), modular_j(u));
  Complex rhs = std::conj(inner(v, u));
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));

  // Positive-cone vectors Lambda(h^{1/2}) are fixed without roundoff.
  State h = random_state(s, rng);
  GnsVector xi{h.sqrt()};
  CHECK(vec_diff(modular_j(xi), xi) == 0.0);
}

TEST_CASE("degenerate omega: zeros enter the spectrum, Delta^0 projects") {
  AlgebraShape s({2}, {1.0});
  State phi(Element::diagonal(s, {{0.5, 0.5}}));
  State omega(Element::diagonal(s, {{1.0, 0.0}}));
  RelativeModular delta = RelativeModular::build(phi, omega);

  std::vector<double> eigs = delta.eigenvalues();
  std::vector<double> expected{0.0, 0.0, 0.5, 0.5};
  REQUIRE(eigs.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(eigs[i] - expected[i]) <= 1e-14);

  GnsVector ones{Element(s, {(Matrix(2, 2) << 1, 1, 1, 1).finished()})};
  Element want(s, {(Matrix(2, 2) << 1, 0, 1, 0).finished()});
  CHECK(vec_diff(delta.apply_support(ones), GnsVector{want}) <= 1e-14);
  CHECK(vec_diff(delta.apply_power(0.0, ones), delta.apply_support(ones)) <= 1e-15);
}

TEST_CASE("non-commuting pair: product spectrum") {
  AlgebraShape s({2}, {1.0});
  // Eigenvalues 3/4 and 1/4 along (1, 1) and (1, -1).
  State phi(Element(s, {(Matrix(2, 2) << 0.5, 0.25, 0.25, 0.5).finished()}));
  State omega(Element::diagonal(s, {{0.8, 0.2}}));
  RelativeModular delta = RelativeModular::build(phi, omega);

  // {3/4, 1/4} x {1/0.8, 1/0.2} = {0.9375, 3.75, 0.3125, 1.25}.
  std::vector<double> eigs = delta.eigenvalues();
  std::vector<double> expected{0.3125, 0.9375, 1.25, 3.75};
  REQUIRE(eigs.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(eigs[i] - expected[i]) <= 1e-12);

  // <xi | Delta^s xi> = tau(h_phi^s h_omega^{1-s}) for xi = Lambda(h_omega^{1/2}).
  GnsVector xi{omega.sqrt()};
  for (double sexp : {0.25, 0.5, 0.75, 1.0}) {
    Complex got = inner(xi, delta.apply_power(sexp, xi));
    Complex want = trace(phi.power(sexp) * omega.power(1.0 - sexp));
    CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    CHECK(std::abs(got.imag()) <= 1e-12);
  }

  // Pairing weights are nonnegative and resolve ||v||^2.
  Rng rng(29);
  GnsVector v{random_element(s, rng)};
  double total = 0;
  for (const PairingTerm& t : delta.pairing(v)) {
    CHECK(t.weight >= -1e-14);
    total += t.weight;
  }
  CHECK(std::abs(total - inner(v, v).real()) <= 1e-12 * std::max(1.0, total));
}

TEST_CASE("paired spectral data agrees with the dense oracle") {
  for (const AlgebraShape& s : {AlgebraShape({8}, {1.0}), AlgebraShape({3, 3}, {1.0, 0.5})}) {
    Rng rng(101 + s.gns_dim());
    State phi = random_state(s, rng);
    State omega = random_state(s, rng);
    RelativeModular delta = RelativeModular::build(phi, omega);

    Matrix dense = delta.dense_matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
    REQUIRE(es.info() == Eigen::Success);
    std::vector<double> paired = delta.eigenvalues();
    CHECK(max_abs_diff(paired, es.eigenvalues()) <= 1e-9 * std::max(1.0, paired.back()));

    GnsVector v{random_element(s, rng)};
    Eigen::VectorXcd via_dense = dense * gns_coordinates(v);
    Eigen::VectorXcd direct = gns_coordinates(delta.apply(v));
    CHECK((via_dense - direct).norm() <= 1e-10 * std::max(1.0, direct.norm()));
  }
}

TEST_CASE("weighted one-dimensional blocks") {
  AlgebraShape s({1, 1}, {2.0, 0.5});
  State phi(Element::diagonal(s, {{0.25}, {1.0}}));    // mass 1
  State omega(Element::diagonal(s, {{0.375}, {0.5}}));  // mass 1
  RelativeModular delta = RelativeModular::build(phi, omega);

  std::vector<double> eigs = delta.eigenvalues();
  REQUIRE(eigs.size() == 2);
  CHECK(std::abs(eigs[0] - 0.25 / 0.375) <= 1e-14);
  CHECK(std::abs(eigs[1] - 1.0 / 0.5) <= 1e-14);

  // Full supports make the expectation of Delta against xi the total phi mass.
  GnsVector xi{omega.sqrt()};
  CHECK(std::abs(inner(xi, delta.apply(xi)) - Complex(1.0, 0.0)) <= 1e-13);
}

TEST_CASE("modular error paths") {
  AlgebraShape s({2}, {1.0});
  AlgebraShape other({3}, {1.0});
  State phi(Element::diagonal(s, {{0.75, 0.25}}));
  State omega(Element::diagonal(s, {{0.5, 0.5}}));
  State big(Element::diagonal(other, {{0.5, 0.25, 0.25}}));

  CHECK_THROWS_AS(RelativeModular::build(phi, big), std::invalid_argument);
  CHECK_THROWS_AS(s_operator_apply(phi, big, Element::identity(s)), std::invalid_argument);

  RelativeModular delta = RelativeModular::build(phi, omega);
  GnsVector v{Element::identity(s)};
  CHECK_THROWS_AS(delta.apply_power(-0.5, v), std::invalid_argument);
  CHECK_THROWS_WITH_AS(delta.dense_matrix(2),
                       "dense oracle dimension D=4 exceeds cap 2", std::runtime_error);
  CHECK_THROWS_AS(delta.pairing(GnsVector{Element::identity(other)}), std::invalid_argument);
}
