#include "relmod/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace relmod {

namespace {

// Raw eigendata of one block, ascending eigenvalues.
struct BlockEig {
  Eigen::VectorXd values;
  Matrix vectors;
};

std::vector<BlockEig> eigendecompose_blocks(const Element& x) {
  std::vector<BlockEig> out;
  out.reserve(x.blocks());
  for (int k = 0; k < x.blocks(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x.block(k));
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigendecomposition failed on block " + std::to_string(k));
    out.push_back({es.eigenvalues(), es.eigenvectors()});
  }
  return out;
}

Element require_hermitian(const Element& x, const char* who) {
  if (!x.is_hermitian())
    throw std::invalid_argument(std::string(who) + ": element is not Hermitian within tolerance");
  return x.hermitized();
}

double spectrum_max_abs(const std::vector<BlockEig>& eigs) {
  double m = 0;
  for (const auto& e : eigs)
    for (int i = 0; i < e.values.size(); ++i) m = std::max(m, std::abs(e.values[i]));
  return m;
}

// sum f(lambda) v v* over eigenvalues strictly above the kernel threshold.
// Shared backbone of support, w_transform and psd_clip.
Element positive_filtered(const Element& x, double eta, double psd_tol, const char* who,
                          const std::function<double(double)>& coeff) {
  Element h = require_hermitian(x, who);
  auto eigs = eigendecompose_blocks(h);
  double scale = std::max(1.0, spectrum_max_abs(eigs));
  double kernel = eta * scale;
  double negative = -psd_tol * scale;
  std::vector<Matrix> blocks;
  blocks.reserve(h.blocks());
  for (int k = 0; k < h.blocks(); ++k) {
    const auto& e = eigs[k];
    Matrix acc = Matrix::Zero(e.vectors.rows(), e.vectors.cols());
    for (int i = 0; i < e.values.size(); ++i) {
      double lam = e.values[i];
      if (lam < negative)
        throw std::domain_error(std::string(who) + ": negative eigenvalue " +
                                std::to_string(lam) + " in block " + std::to_string(k));
      if (lam <= kernel) continue;
      acc += coeff(lam) * (e.vectors.col(i) * e.vectors.col(i).adjoint());
    }
    blocks.push_back(0.5 * (acc + acc.adjoint().eval()));
  }
  return Element(h.shape(), std::move(blocks));
}

}  // namespace

AlgebraShape::AlgebraShape(std::vector<int> block_dims, std::vector<double> weights)
    : dims_(std::move(block_dims)), weights_(std::move(weights)) {
  if (dims_.empty() || dims_.size() != weights_.size())
    throw std::invalid_argument("shape needs matching, nonempty dims and weights");
  for (int n : dims_)
    if (n < 1) throw std::invalid_argument("block dimension must be >= 1");
  for (double w : weights_)
    if (!(w > 0) || !std::isfinite(w))
      throw std::invalid_argument("trace weights must be strictly positive and finite");
}

int AlgebraShape::total_dim() const {
  int t = 0;
  for (int n : dims_) t += n;
  return t;
}

int AlgebraShape::gns_dim() const {
  int t = 0;
  for (int n : dims_) t += n * n;
  return t;
}

double AlgebraShape::min_weight() const {
  return *std::min_element(weights_.begin(), weights_.end());
}

std::string AlgebraShape::to_string() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
  os << "] w=[";
  for (size_t i = 0; i < weights_.size(); ++i) os << (i ? "," : "") << weights_[i];
  os << "]";
  return os.str();
}

bool AlgebraShape::operator==(const AlgebraShape& other) const {
  return dims_ == other.dims_ && weights_ == other.weights_;
}

Element::Element(AlgebraShape shape) : shape_(std::move(shape)) {
  blocks_.reserve(shape_.blocks());
  for (int k = 0; k < shape_.blocks(); ++k)
    blocks_.push_back(Matrix::Zero(shape_.dim(k), shape_.dim(k)));
}

Element::Element(AlgebraShape shape, std::vector<Matrix> blocks)
    : shape_(std::move(shape)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != shape_.blocks())
    throw std::invalid_argument("block count does not match shape");
  for (int k = 0; k < shape_.blocks(); ++k) {
    const Matrix& b = blocks_[k];
    if (b.rows() != shape_.dim(k) || b.cols() != shape_.dim(k))
      throw std::invalid_argument("block " + std::to_string(k) + " does not match shape dimension");
    if (!b.allFinite())
      throw std::invalid_argument("block " + std::to_string(k) + " contains non-finite entries");
  }
}

Element Element::identity(const AlgebraShape& shape) {
  std::vector<Matrix> blocks;
  blocks.reserve(shape.blocks());
  for (int k = 0; k < shape.blocks(); ++k)
    blocks.push_back(Matrix::Identity(shape.dim(k), shape.dim(k)));
  return Element(shape, std::move(blocks));
}

Element Element::diagonal(const AlgebraShape& shape,
                          const std::vector<std::vector<double>>& entries) {
  if (static_cast<int>(entries.size()) != shape.blocks())
    throw std::invalid_argument("diagonal: entry list does not match block count");
  std::vector<Matrix> blocks;
  blocks.reserve(shape.blocks());
  for (int k = 0; k < shape.blocks(); ++k) {
    if (static_cast<int>(entries[k].size()) != shape.dim(k))
      throw std::invalid_argument("diagonal: wrong entry count in block " + std::to_string(k));
    Matrix b = Matrix::Zero(shape.dim(k), shape.dim(k));
    for (int i = 0; i < shape.dim(k); ++i) b(i, i) = entries[k][i];
    blocks.push_back(std::move(b));
  }
  return Element(shape, std::move(blocks));
}

Element Element::adjoint() const {
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (const Matrix& b : blocks_) blocks.push_back(b.adjoint());
  return Element(shape_, std::move(blocks));
}

Element Element::hermitized() const {
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (const Matrix& b : blocks_) blocks.push_back(0.5 * (b + b.adjoint().eval()));
  return Element(shape_, std::move(blocks));
}

bool Element::is_hermitian(double tol) const {
  double dev = 0;
  for (const Matrix& b : blocks_) dev = std::max(dev, (b - b.adjoint().eval()).cwiseAbs().maxCoeff());
  return dev <= tol * std::max(1.0, max_abs());
}

double Element::max_abs() const {
  double m = 0;
  for (const Matrix& b : blocks_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

namespace {
void check_same_shape(const Element& a, const Element& b, const char* who) {
  if (a.shape() != b.shape()) throw std::invalid_argument(std::string(who) + ": shape mismatch");
}
}  // namespace

Element operator+(const Element& a, const Element& b) {
  check_same_shape(a, b, "operator+");
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks());
  for (int k = 0; k < a.blocks(); ++k) blocks.push_back(a.block(k) + b.block(k));
  return Element(a.shape(), std::move(blocks));
}

Element operator-(const Element& a, const Element& b) {
  check_same_shape(a, b, "operator-");
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks());
  for (int k = 0; k < a.blocks(); ++k) blocks.push_back(a.block(k) - b.block(k));
  return Element(a.shape(), std::move(blocks));
}

Element operator*(const Element& a, const Element& b) {
  check_same_shape(a, b, "operator*");
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks());
  for (int k = 0; k < a.blocks(); ++k) blocks.push_back(a.block(k) * b.block(k));
  return Element(a.shape(), std::move(blocks));
}

Element operator*(Complex c, const Element& a) {
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks());
  for (int k = 0; k < a.blocks(); ++k) blocks.push_back(c * a.block(k));
  return Element(a.shape(), std::move(blocks));
}

Element operator*(double c, const Element& a) { return Complex(c, 0) * a; }

Element operator-(const Element& a) { return Complex(-1, 0) * a; }

Complex trace(const Element& x) {
  Complex t = 0;
  for (int k = 0; k < x.blocks(); ++k) t += x.shape().weight(k) * x.block(k).trace();
  return t;
}

double p_norm(const Element& x, double p) {
  bool infinite = std::isinf(p) && p > 0;
  if (!infinite && !(p >= 1)) throw std::invalid_argument("p_norm: p must be >= 1 or infinity");

  // singular values per block; Hermitian elements reuse the eigenvalue route
  std::vector<Eigen::VectorXd> svals;
  svals.reserve(x.blocks());
  if (x.is_hermitian()) {
    for (const auto& e : eigendecompose_blocks(x.hermitized())) svals.push_back(e.values.cwiseAbs());
  } else {
    for (int k = 0; k < x.blocks(); ++k) {
      Eigen::JacobiSVD<Matrix> svd(x.block(k));
      svals.push_back(svd.singularValues());
    }
  }

  if (infinite) {
    double m = 0;
    for (const auto& s : svals)
      if (s.size() > 0) m = std::max(m, s.maxCoeff());
    return m;
  }
  double acc = 0;
  for (int k = 0; k < x.blocks(); ++k)
    for (int i = 0; i < svals[k].size(); ++i) acc += x.shape().weight(k) * std::pow(svals[k][i], p);
  return std::pow(acc, 1.0 / p);
}

double inf_norm(const Element& x) { return p_norm(x, kInf); }

SpectralDecomposition spectral_decompose(const Element& x, double group_tol) {
  Element h = require_hermitian(x, "spectral_decompose");
  auto eigs = eigendecompose_blocks(h);

  struct Entry {
    double lam;
    int block;
    int col;
  };
  std::vector<Entry> entries;
  for (int k = 0; k < h.blocks(); ++k)
    for (int i = 0; i < eigs[k].values.size(); ++i) entries.push_back({eigs[k].values[i], k, i});
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.lam < b.lam; });

  double width = group_tol * std::max(1.0, spectrum_max_abs(eigs));

  SpectralDecomposition out;
  size_t i = 0;
  while (i < entries.size()) {
    size_t j = i + 1;
    while (j < entries.size() && entries[j].lam - entries[j - 1].lam <= width) ++j;
    double mean = 0;
    for (size_t m = i; m < j; ++m) mean += entries[m].lam;
    mean /= static_cast<double>(j - i);

    std::vector<Matrix> blocks;
    for (int k = 0; k < h.blocks(); ++k)
      blocks.push_back(Matrix::Zero(h.shape().dim(k), h.shape().dim(k)));
    for (size_t m = i; m < j; ++m) {
      const auto& v = eigs[entries[m].block].vectors.col(entries[m].col);
      blocks[entries[m].block] += v * v.adjoint();
    }
    for (auto& b : blocks) b = 0.5 * (b + b.adjoint().eval());

    out.eigenvalues.push_back(mean);
    out.projections.emplace_back(h.shape(), std::move(blocks));
    i = j;
  }
  return out;
}

Element func_calc(const Element& x, const std::function<double(double)>& f,
                  double zero_convention, double group_tol, double eta) {
  SpectralDecomposition d = spectral_decompose(x, group_tol);
  double scale = 1.0;
  for (double lam : d.eigenvalues) scale = std::max(scale, std::abs(lam));
  double kernel = eta * scale;

  Element acc(x.shape());
  for (int i = 0; i < d.size(); ++i) {
    double lam = d.eigenvalues[i];
    double c;
    if (std::abs(lam) <= kernel) {
      c = zero_convention;
    } else {
      c = f(lam);
      if (!std::isfinite(c))
        throw std::domain_error("func_calc: function is not finite at eigenvalue " +
                                std::to_string(lam));
    }
    if (c != 0.0) acc = acc + c * d.projections[i];
  }
  return acc;
}

Element support(const Element& x, double eta) {
  return positive_filtered(x, eta, kPsdTol, "support", [](double) { return 1.0; });
}

Element w_transform(const Element& h, double eta) {
  return positive_filtered(h, eta, kPsdTol, "w_transform", [](double lam) { return 1.0 / lam; });
}

Element psd_clip(const Element& x, double eta, double psd_tol) {
  return positive_filtered(x, eta, psd_tol, "psd_clip", [](double lam) { return lam; });
}

Element truncate(const Element& x, double n, double group_tol) {
  if (!(n > 0) || !std::isfinite(n)) throw std::invalid_argument("truncate: bound must be positive");
  SpectralDecomposition d = spectral_decompose(x, group_tol);
  Element acc(x.shape());
  for (int i = 0; i < d.size(); ++i)
    if (std::abs(d.eigenvalues[i]) <= n) acc = acc + d.eigenvalues[i] * d.projections[i];
  return acc;
}

double tail_trace(const Element& x, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("tail_trace: eps must be positive");
  Element h = require_hermitian(x, "tail_trace");
  auto eigs = eigendecompose_blocks(h);
  double acc = 0;
  for (int k = 0; k < h.blocks(); ++k)
    for (int i = 0; i < eigs[k].values.size(); ++i)
      if (std::abs(eigs[k].values[i]) >= eps) acc += h.shape().weight(k);
  return acc;
}

int block_rank(const Element& projection, int k) {
  return static_cast<int>(std::llround(projection.block(k).trace().real()));
}

State::State(Element density, double eta, double psd_tol)
    : density_(Element(density.shape())), support_(Element(density.shape())) {
  if (!density.is_hermitian())
    throw std::domain_error("state density is not Hermitian within tolerance");
  density_ = density.hermitized();

  auto eigs = eigendecompose_blocks(density_);
  double scale = std::max(1.0, spectrum_max_abs(eigs));
  double kernel = eta * scale;
  double negative = -psd_tol * scale;

  std::vector<Matrix> supp;
  for (int k = 0; k < density_.blocks(); ++k) {
    auto& e = eigs[k];
    Matrix acc = Matrix::Zero(e.vectors.rows(), e.vectors.cols());
    for (int i = 0; i < e.values.size(); ++i) {
      if (e.values[i] < negative)
        throw std::domain_error("state density has negative eigenvalue " +
                                std::to_string(e.values[i]) + " in block " + std::to_string(k));
      if (e.values[i] <= kernel) {
        e.values[i] = 0.0;  // exact kernel; powers and logs key off this
      } else {
        mass_ += density_.shape().weight(k) * e.values[i];
        acc += e.vectors.col(i) * e.vectors.col(i).adjoint();
      }
    }
    supp.push_back(0.5 * (acc + acc.adjoint().eval()));
    eigvals_.push_back(std::move(e.values));
    eigvecs_.push_back(std::move(e.vectors));
  }
  support_ = Element(density_.shape(), std::move(supp));

  if (!(mass_ > 0) || !std::isfinite(mass_))
    throw std::domain_error("state density is numerically zero (mass must be positive)");
}

Element State::power(double s) const {
  if (!std::isfinite(s)) throw std::invalid_argument("power: exponent must be finite");
  return apply_spectrum([s](double lam) { return std::pow(lam, s); }, 0.0);
}

Element State::apply_spectrum(const std::function<double(double)>& f, double kernel_value) const {
  std::vector<Matrix> blocks;
  blocks.reserve(density_.blocks());
  for (int k = 0; k < density_.blocks(); ++k) {
    const auto& vals = eigvals_[k];
    const auto& vecs = eigvecs_[k];
    Matrix acc = Matrix::Zero(vecs.rows(), vecs.cols());
    for (int i = 0; i < vals.size(); ++i) {
      double c = vals[i] > 0 ? f(vals[i]) : kernel_value;
      if (c == 0.0) continue;
      if (!std::isfinite(c))
        throw std::domain_error("apply_spectrum: non-finite value at eigenvalue " +
                                std::to_string(vals[i]));
      acc += c * (vecs.col(i) * vecs.col(i).adjoint());
    }
    blocks.push_back(0.5 * (acc + acc.adjoint().eval()));
  }
  return Element(density_.shape(), std::move(blocks));
}

SpectralDecomposition State::clipped_spectrum(double group_tol) const {
  struct Entry {
    double lam;
    int block;
    int col;
  };
  std::vector<Entry> kernel, positive;
  double maxlam = 0;
  for (int k = 0; k < density_.blocks(); ++k)
    for (int i = 0; i < eigvals_[k].size(); ++i) {
      double lam = eigvals_[k][i];
      maxlam = std::max(maxlam, lam);
      (lam > 0 ? positive : kernel).push_back({lam, k, i});
    }
  std::sort(positive.begin(), positive.end(),
            [](const Entry& a, const Entry& b) { return a.lam < b.lam; });
  double width = group_tol * std::max(1.0, maxlam);

  SpectralDecomposition out;
  auto emit = [&](const std::vector<Entry>& members, double value) {
    std::vector<Matrix> blocks;
    for (int k = 0; k < density_.blocks(); ++k)
      blocks.push_back(Matrix::Zero(density_.shape().dim(k), density_.shape().dim(k)));
    for (const Entry& m : members) {
      const auto& v = eigvecs_[m.block].col(m.col);
      blocks[m.block] += v * v.adjoint();
    }
    for (auto& b : blocks) b = 0.5 * (b + b.adjoint().eval());
    out.eigenvalues.push_back(value);
    out.projections.emplace_back(density_.shape(), std::move(blocks));
  };

  // the kernel is its own group: pseudo-inverses and zeroth powers depend on
  // it never merging with small positive eigenvalues
  if (!kernel.empty()) emit(kernel, 0.0);

  size_t i = 0;
  while (i < positive.size()) {
    size_t j = i + 1;
    while (j < positive.size() && positive[j].lam - positive[j - 1].lam <= width) ++j;
    std::vector<Entry> members(positive.begin() + i, positive.begin() + j);
    double mean = 0;
    for (const Entry& m : members) mean += m.lam;
    emit(members, mean / static_cast<double>(members.size()));
    i = j;
  }
  return out;
}

Complex State::value(const Element& x) const { return trace(x * density_); }

}  // namespace relmod
