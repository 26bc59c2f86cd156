#include "relmod/modular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relmod {

RelativeModular RelativeModular::build(const State& phi, const State& omega, double group_tol) {
  if (phi.shape() != omega.shape())
    throw std::invalid_argument("build_delta: states have different shapes");

  RelativeModular d;
  d.shape_ = phi.shape();
  d.phi_spec_ = phi.clipped_spectrum(group_tol);
  d.s_phi_ = phi.support_projection();
  d.s_omega_ = omega.support_projection();
  d.h_phi_dense_ = phi.density();
  d.h_omega_tilde_dense_ = omega.apply_spectrum([](double lam) { return 1.0 / lam; }, 0.0);

  // h_omega-tilde shares omega's spectral projections; w is injective on the
  // clipped spectrum, so only the ordering changes (positives reverse)
  SpectralDecomposition om = omega.clipped_spectrum(group_tol);
  std::vector<int> order(om.size());
  for (int j = 0; j < om.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double wa = om.eigenvalues[a] > 0 ? 1.0 / om.eigenvalues[a] : 0.0;
    double wb = om.eigenvalues[b] > 0 ? 1.0 / om.eigenvalues[b] : 0.0;
    return wa < wb;
  });
  for (int j : order) {
    double lam = om.eigenvalues[j];
    d.omega_tilde_spec_.eigenvalues.push_back(lam > 0 ? 1.0 / lam : 0.0);
    d.omega_tilde_spec_.projections.push_back(om.projections[j]);
  }
  return d;
}

Element RelativeModular::power_phi(double s) const {
  Element acc(shape_);
  for (int i = 0; i < phi_spec_.size(); ++i) {
    double lam = phi_spec_.eigenvalues[i];
    if (lam <= 0) continue;  // kernel convention 0^s = 0, including s = 0
    acc = acc + std::pow(lam, s) * phi_spec_.projections[i];
  }
  return acc;
}

Element RelativeModular::power_omega_tilde(double s) const {
  Element acc(shape_);
  for (int j = 0; j < omega_tilde_spec_.size(); ++j) {
    double lam = omega_tilde_spec_.eigenvalues[j];
    if (lam <= 0) continue;
    acc = acc + std::pow(lam, s) * omega_tilde_spec_.projections[j];
  }
  return acc;
}

GnsVector RelativeModular::apply(const GnsVector& v) const { return apply_power(1.0, v); }

GnsVector RelativeModular::apply_power(double s, const GnsVector& v) const {
  if (!(s >= 0)) throw std::invalid_argument("delta_power_apply: exponent must be >= 0");
  if (v.carrier.shape() != shape_)
    throw std::invalid_argument("delta_power_apply: vector shape mismatch");
  return {power_phi(s) * v.carrier * power_omega_tilde(s)};
}

GnsVector RelativeModular::apply_support(const GnsVector& v) const {
  return {s_phi_ * v.carrier * s_omega_};
}

std::vector<PairingTerm> RelativeModular::pairing(const GnsVector& v) const {
  if (v.carrier.shape() != shape_) throw std::invalid_argument("pairing: vector shape mismatch");
  std::vector<PairingTerm> terms;
  terms.reserve(static_cast<size_t>(phi_spec_.size()) * omega_tilde_spec_.size());
  for (int i = 0; i < phi_spec_.size(); ++i) {
    Element left = phi_spec_.projections[i] * v.carrier;
    for (int j = 0; j < omega_tilde_spec_.size(); ++j) {
      Element piece = left * omega_tilde_spec_.projections[j];
      double w = 0;
      for (int k = 0; k < shape_.blocks(); ++k)
        w += shape_.weight(k) * piece.block(k).squaredNorm();
      terms.push_back({phi_spec_.eigenvalues[i], omega_tilde_spec_.eigenvalues[j], w});
    }
  }
  return terms;
}

std::vector<double> RelativeModular::eigenvalues() const {
  std::vector<double> out;
  out.reserve(shape_.gns_dim());
  for (int i = 0; i < phi_spec_.size(); ++i)
    for (int j = 0; j < omega_tilde_spec_.size(); ++j) {
      int mult = 0;
      for (int k = 0; k < shape_.blocks(); ++k)
        mult += block_rank(phi_spec_.projections[i], k) *
                block_rank(omega_tilde_spec_.projections[j], k);
      double mu = phi_spec_.eigenvalues[i] * omega_tilde_spec_.eigenvalues[j];
      out.insert(out.end(), mult, mu);
    }
  if (static_cast<int>(out.size()) != shape_.gns_dim())
    throw std::runtime_error("pairing multiplicities do not add up to the space dimension");
  std::sort(out.begin(), out.end());
  return out;
}

Matrix RelativeModular::dense_matrix(int cap) const {
  int D = shape_.gns_dim();
  if (D > cap)
    throw std::runtime_error("dense oracle dimension D=" + std::to_string(D) +
                             " exceeds cap " + std::to_string(cap));
  return dense_sandwich(h_phi_dense_, h_omega_tilde_dense_);
}

GnsVector s_operator_apply(const State& phi, const State& omega, const Element& x) {
  if (phi.shape() != omega.shape() || x.shape() != phi.shape())
    throw std::invalid_argument("s_operator_apply: shape mismatch");
  return {omega.support_projection() * x.adjoint() * phi.sqrt()};
}

GnsVector modular_j(const GnsVector& v) { return {v.carrier.adjoint()}; }

}  // namespace relmod
