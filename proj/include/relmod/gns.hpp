#pragma once

#include "relmod/algebra.hpp"

namespace relmod {

// A vector of the GNS space H = L^2(M, tau): the algebra itself under
// <a|b> = tau(a* b), with Lambda the identity embedding. The carrier is the
// operator a with Lambda(a) the vector.
struct GnsVector {
  Element carrier;
};

Complex inner(const GnsVector& a, const GnsVector& b);  // tau(a* b)
double norm(const GnsVector& v);

// Left representation pi(x): Lambda(a) -> Lambda(x a).
GnsVector apply_left(const Element& x, const GnsVector& v);
// Right antirepresentation pi'(x): Lambda(a) -> Lambda(a x).
GnsVector apply_right(const Element& x, const GnsVector& v);

// Support of Lambda(h^{1/2}) relative to pi(M) resp. pi'(M): both equal the
// algebra projection s(h), to be applied on the left resp. right side.
// The carrier must be positive.
Element vector_support_left(const GnsVector& v, double eta = kSupportEta);
Element vector_support_right(const GnsVector& v, double eta = kSupportEta);

// rho(x) for Hermitian x through the symmetric form tau(h^{1/2} x h^{1/2});
// equals tau(h x).
double expectation(const State& rho, const Element& x);

// Dense-matrix tooling on the weighted orthonormal basis of H: matrix units
// E^{(k)}_{pq} scaled by w_k^{-1/2}, ordered block-major then row-major.
int gns_dim(const AlgebraShape& shape);
Eigen::VectorXcd gns_coordinates(const GnsVector& v);
GnsVector gns_from_coordinates(const AlgebraShape& shape, const Eigen::VectorXcd& coords);

// Matrix of the map a -> x a y; block k contributes kron(x_k, y_k^T).
Matrix dense_sandwich(const Element& x, const Element& y);
Matrix dense_left(const Element& x);   // pi(x)
Matrix dense_right(const Element& y);  // pi'(y)

}  // namespace relmod
