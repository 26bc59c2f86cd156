#include "relmod/gns.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace relmod {

Complex inner(const GnsVector& a, const GnsVector& b) {
  if (a.carrier.shape() != b.carrier.shape())
    throw std::invalid_argument("inner: shape mismatch");
  Complex t = 0;
  const AlgebraShape& shape = a.carrier.shape();
  for (int k = 0; k < shape.blocks(); ++k)
    t += shape.weight(k) * (a.carrier.block(k).adjoint() * b.carrier.block(k)).trace();
  return t;
}

double norm(const GnsVector& v) {
  double acc = 0;
  const AlgebraShape& shape = v.carrier.shape();
  for (int k = 0; k < shape.blocks(); ++k)
    acc += shape.weight(k) * v.carrier.block(k).squaredNorm();
  return std::sqrt(acc);
}

GnsVector apply_left(const Element& x, const GnsVector& v) { return {x * v.carrier}; }

GnsVector apply_right(const Element& x, const GnsVector& v) { return {v.carrier * x}; }

Element vector_support_left(const GnsVector& v, double eta) {
  try {
    return support(v.carrier, eta);
  } catch (const std::exception& e) {
    throw std::domain_error(std::string("vector_support: carrier is not positive (") + e.what() +
                            ")");
  }
}

Element vector_support_right(const GnsVector& v, double eta) {
  return vector_support_left(v, eta);
}

double expectation(const State& rho, const Element& x) {
  if (!x.is_hermitian()) throw std::invalid_argument("expectation: element is not Hermitian");
  Element s = rho.sqrt();
  return trace(s * x * s).real();
}

int gns_dim(const AlgebraShape& shape) { return shape.gns_dim(); }

Eigen::VectorXcd gns_coordinates(const GnsVector& v) {
  const AlgebraShape& shape = v.carrier.shape();
  Eigen::VectorXcd out(shape.gns_dim());
  int off = 0;
  for (int k = 0; k < shape.blocks(); ++k) {
    int n = shape.dim(k);
    double scale = std::sqrt(shape.weight(k));
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) out[off + p * n + q] = scale * v.carrier.block(k)(p, q);
    off += n * n;
  }
  return out;
}

GnsVector gns_from_coordinates(const AlgebraShape& shape, const Eigen::VectorXcd& coords) {
  if (coords.size() != shape.gns_dim())
    throw std::invalid_argument("gns_from_coordinates: wrong coordinate count");
  std::vector<Matrix> blocks;
  int off = 0;
  for (int k = 0; k < shape.blocks(); ++k) {
    int n = shape.dim(k);
    double scale = 1.0 / std::sqrt(shape.weight(k));
    Matrix b(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) b(p, q) = scale * coords[off + p * n + q];
    blocks.push_back(std::move(b));
    off += n * n;
  }
  return {Element(shape, std::move(blocks))};
}

Matrix dense_sandwich(const Element& x, const Element& y) {
  if (x.shape() != y.shape()) throw std::invalid_argument("dense_sandwich: shape mismatch");
  const AlgebraShape& shape = x.shape();
  int D = shape.gns_dim();
  Matrix out = Matrix::Zero(D, D);
  int off = 0;
  for (int k = 0; k < shape.blocks(); ++k) {
    int n = shape.dim(k);
    // the w_k^{-1/2} basis scaling cancels between the two slots, so the
    // block is weight independent
    out.block(off, off, n * n, n * n) =
        Eigen::kroneckerProduct(x.block(k), y.block(k).transpose());
    off += n * n;
  }
  return out;
}

Matrix dense_left(const Element& x) { return dense_sandwich(x, Element::identity(x.shape())); }

Matrix dense_right(const Element& y) { return dense_sandwich(Element::identity(y.shape()), y); }

}  // namespace relmod
