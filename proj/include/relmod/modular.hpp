#pragma once

#include "relmod/algebra.hpp"
#include "relmod/gns.hpp"

namespace relmod {

inline constexpr int kOracleCap = 4096;  // largest D for which dense oracles are built

// One joint spectral component of Delta: eigenvalue alpha * gamma carrying the
// squared H-norm of the vector's (i, j) piece.
struct PairingTerm {
  double alpha;   // eigenvalue of h_phi
  double gamma;   // eigenvalue of h_omega-tilde
  double weight;  // ||e_i c f_j||_H^2 for the carrier c
};

// The relative modular operator Delta(phi, omega): a -> h_phi a h_omega-tilde,
// held as paired spectral data {(alpha_i, e_i)} x {(gamma_j, f_j)} instead of
// a dense D x D matrix (n^3 work instead of n^6). Zero eigenvalues are kept in
// both families so that supports and zeroth powers fall out of the same data.
class RelativeModular {
 public:
  static RelativeModular build(const State& phi, const State& omega,
                               double group_tol = kGroupTol);

  const AlgebraShape& shape() const { return shape_; }
  const SpectralDecomposition& phi_spectrum() const { return phi_spec_; }
  const SpectralDecomposition& omega_tilde_spectrum() const { return omega_tilde_spec_; }
  const Element& support_phi() const { return s_phi_; }
  const Element& support_omega() const { return s_omega_; }

  GnsVector apply(const GnsVector& v) const;  // Delta itself
  // Delta^s for s >= 0: a -> h_phi^s a h_omega-tilde^s, zeroth powers through
  // the supports, so s = 0 gives the projection Delta^0.
  GnsVector apply_power(double s, const GnsVector& v) const;
  GnsVector apply_support(const GnsVector& v) const;  // Delta^0: a -> s(phi) a s(omega)

  // Weights of v against the joint eigenprojections a -> e_i a f_j. Zero
  // pairs are retained with value 0; weights sum to ||v||^2.
  std::vector<PairingTerm> pairing(const GnsVector& v) const;

  // Eigenvalue multiset {alpha_i gamma_j}, each with multiplicity
  // sum_k rank_k(e_i) rank_k(f_j), ascending; length gns_dim().
  std::vector<double> eigenvalues() const;

  // Dense matrix on the weighted orthonormal basis, built from the original
  // densities rather than the grouped spectra so it stays an independent
  // cross-check. Throws once D exceeds the cap.
  Matrix dense_matrix(int cap = kOracleCap) const;

 private:
  RelativeModular() = default;

  Element power_phi(double s) const;
  Element power_omega_tilde(double s) const;

  AlgebraShape shape_;
  SpectralDecomposition phi_spec_;          // h_phi, ascending, kernel kept as 0
  SpectralDecomposition omega_tilde_spec_;  // h_omega-tilde = w(h_omega)
  Element s_phi_{AlgebraShape({1}, {1})};
  Element s_omega_{AlgebraShape({1}, {1})};
  Element h_phi_dense_{AlgebraShape({1}, {1})};        // original density of phi
  Element h_omega_tilde_dense_{AlgebraShape({1}, {1})};
};

// Araki S operator on Lambda(x h_omega^{1/2}): returns Lambda(s(omega) x* h_phi^{1/2}).
GnsVector s_operator_apply(const State& phi, const State& omega, const Element& x);

// Antiunitary polar factor J: carrier -> carrier*. J^2 = id and J fixes every
// positive-cone vector Lambda(h^{1/2}) exactly.
GnsVector modular_j(const GnsVector& v);

}  // namespace relmod
