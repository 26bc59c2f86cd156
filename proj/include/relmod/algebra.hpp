#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relmod {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Shared numeric gates. All of them are relative tolerances, scaled by
// max(1, scale of the input) at the point of use.
inline constexpr double kGroupTol = 1e-10;    // eigenvalue grouping width
inline constexpr double kSupportEta = 1e-12;  // kernel threshold for supports and pseudo-inverses
inline constexpr double kHermTol = 1e-10;     // hermiticity acceptance
inline constexpr double kPsdTol = 1e-10;      // negative-eigenvalue acceptance for densities
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Block structure of the algebra together with the trace weight of each block.
// The reference trace everywhere is tau(x) = sum_k weights[k] * tr(x_k);
// strictly positive weights keep tau faithful.
class AlgebraShape {
 public:
  AlgebraShape() = default;
  AlgebraShape(std::vector<int> block_dims, std::vector<double> weights);

  int blocks() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_[k]; }
  double weight(int k) const { return weights_[k]; }
  const std::vector<int>& block_dims() const { return dims_; }
  const std::vector<double>& weights() const { return weights_; }
  int total_dim() const;  // sum of n_k
  int gns_dim() const;    // sum of n_k^2, the dimension of L^2(M, tau)
  double min_weight() const;
  std::string to_string() const;

  bool operator==(const AlgebraShape& other) const;
  bool operator!=(const AlgebraShape& other) const { return !(*this == other); }

 private:
  std::vector<int> dims_;
  std::vector<double> weights_;
};

// One algebra member: a dense complex matrix per block. Immutable after
// construction; every entry must be finite.
class Element {
 public:
  explicit Element(AlgebraShape shape);  // zero element
  Element(AlgebraShape shape, std::vector<Matrix> blocks);

  static Element identity(const AlgebraShape& shape);
  // Hermitian diagonal element, one real entry vector per block.
  static Element diagonal(const AlgebraShape& shape,
                          const std::vector<std::vector<double>>& entries);

  const AlgebraShape& shape() const { return shape_; }
  const Matrix& block(int k) const { return blocks_[k]; }
  int blocks() const { return static_cast<int>(blocks_.size()); }

  Element adjoint() const;
  // (x + x*)/2 with exact entrywise conjugate pairing, so the result is
  // Hermitian bit-for-bit, not just within tolerance.
  Element hermitized() const;
  bool is_hermitian(double tol = kHermTol) const;
  double max_abs() const;  // largest |entry|, used as a cheap scale estimate

 private:
  AlgebraShape shape_;
  std::vector<Matrix> blocks_;
};

Element operator+(const Element& a, const Element& b);
Element operator-(const Element& a, const Element& b);
Element operator*(const Element& a, const Element& b);
Element operator*(Complex c, const Element& a);
Element operator*(double c, const Element& a);
Element operator-(const Element& a);

// Weighted trace tau(x) = sum_k w_k tr(x_k). Real for Hermitian x, strictly
// positive for nonzero positive x.
Complex trace(const Element& x);

// tau(|x|^p)^(1/p) through singular values; p = infinity is the operator norm
// (largest singular value across blocks). Hermitian inputs go through the
// eigenvalue route so that norms stay consistent with the spectral operations.
double p_norm(const Element& x, double p);
double inf_norm(const Element& x);

// Distinct eigenvalues in ascending order with their orthogonal spectral
// projections. Projections sum to the identity and reconstruct the input.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<Element> projections;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

// Eigendecompose a Hermitian element. Eigenvalues closer than
// group_tol * max(1, max|lambda|) are merged into one projection so that
// degenerate eigenspaces stay stable under roundoff.
SpectralDecomposition spectral_decompose(const Element& x, double group_tol = kGroupTol);

// f applied to the spectrum. Eigenvalues inside the kernel threshold are sent
// to zero_convention instead of through f; a non-finite f value on a nonzero
// eigenvalue is an error.
Element func_calc(const Element& x, const std::function<double(double)>& f,
                  double zero_convention = 0.0, double group_tol = kGroupTol,
                  double eta = kSupportEta);

// Orthogonal projection onto the range of a positive element. Eigenvalues
// at or below eta * max(1, max eigenvalue) count as kernel.
Element support(const Element& x, double eta = kSupportEta);

// Spectral pseudo-inverse: 1/lambda on the nonzero spectrum, 0 on the kernel,
// so that w_transform(h) * h = support(h).
Element w_transform(const Element& h, double eta = kSupportEta);

// Clamp tiny negative eigenvalues of a nearly positive element to zero.
// Used to sanitize densities of the form z* z before they feed logarithms.
Element psd_clip(const Element& x, double eta = kSupportEta, double psd_tol = kPsdTol);

// Drop spectral components with |lambda| > n (n > 0); identity operation once
// n reaches the operator norm.
Element truncate(const Element& x, double n, double group_tol = kGroupTol);

// tau of the spectral projection of |x| onto [eps, infinity).
double tail_trace(const Element& x, double eps);

// Rank of a projection restricted to block k (rounded trace of that block).
int block_rank(const Element& projection, int k);

// A positive element of strictly positive trace acting as the density h of a
// state rho(x) = tau(x h). The eigendecomposition is computed once at
// construction, with eigenvalues at or below eta * max(1, ||h||) clipped to
// exactly zero; powers, spectral functions and the support all reuse it so the
// kernel is treated identically everywhere.
class State {
 public:
  explicit State(Element density, double eta = kSupportEta, double psd_tol = kPsdTol);

  const AlgebraShape& shape() const { return density_.shape(); }
  const Element& density() const { return density_; }
  double mass() const { return mass_; }
  const Element& support_projection() const { return support_; }

  // h^s with the kernel convention 0^s = 0; s = 0 yields the support
  // projection (h^0 = s(h)), negative s the pseudo-inverse powers.
  Element power(double s) const;
  Element sqrt() const { return power(0.5); }

  // sum f(lambda) over the clipped spectrum, with the kernel eigenspace
  // contributing kernel_value instead of f(0).
  Element apply_spectrum(const std::function<double(double)>& f, double kernel_value) const;

  // Distinct clipped eigenvalues with projections, ascending; a rank-deficient
  // density contributes the kernel as an exact 0 group that never merges with
  // small positive eigenvalues.
  SpectralDecomposition clipped_spectrum(double group_tol = kGroupTol) const;

  Complex value(const Element& x) const;  // rho(x) = tau(x h)

  const std::vector<Eigen::VectorXd>& block_eigenvalues() const { return eigvals_; }
  const std::vector<Matrix>& block_eigenvectors() const { return eigvecs_; }

 private:
  Element density_;
  double mass_ = 0;
  Element support_;
  std::vector<Eigen::VectorXd> eigvals_;  // ascending, clipped at the kernel threshold
  std::vector<Matrix> eigvecs_;
};

}  // namespace relmod
