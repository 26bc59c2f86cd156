#include "relmod/random.hpp"

#include <cmath>

namespace relmod {

double Rng::normal() {
  double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Element random_element(const AlgebraShape& shape, Rng& rng) {
  std::vector<Matrix> blocks;
  blocks.reserve(shape.blocks());
  for (int k = 0; k < shape.blocks(); ++k) {
    int n = shape.dim(k);
    Matrix b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = rng.cnormal();
    blocks.push_back(std::move(b));
  }
  return Element(shape, std::move(blocks));
}

Element random_hermitian(const AlgebraShape& shape, Rng& rng) {
  return random_element(shape, rng).hermitized();
}

Element random_positive(const AlgebraShape& shape, Rng& rng) {
  Element a = random_element(shape, rng);
  return (a * a.adjoint()).hermitized();
}

Element random_unitary(const AlgebraShape& shape, Rng& rng) {
  Element a = random_element(shape, rng);
  std::vector<Matrix> blocks;
  blocks.reserve(shape.blocks());
  for (int k = 0; k < shape.blocks(); ++k) {
    Eigen::HouseholderQR<Matrix> qr(a.block(k));
    Matrix q = qr.householderQ();
    blocks.push_back(std::move(q));
  }
  return Element(shape, std::move(blocks));
}

Element random_projection(const AlgebraShape& shape, const std::vector<int>& ranks, Rng& rng) {
  std::vector<Matrix> blocks;
  blocks.reserve(shape.blocks());
  for (int k = 0; k < shape.blocks(); ++k) {
    int n = shape.dim(k);
    int r = ranks[k];
    if (r < 0 || r > n) throw std::invalid_argument("random_projection: rank out of range");
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix v = q.leftCols(r);
    Matrix p = v * v.adjoint();
    blocks.push_back(0.5 * (p + p.adjoint().eval()));
  }
  return Element(shape, std::move(blocks));
}

State random_state(const AlgebraShape& shape, Rng& rng) {
  Element h = random_positive(shape, rng);
  double scale = rng.uniform(0.5, 2.0) / trace(h).real();
  return State(scale * h);
}

State random_state_normalized(const AlgebraShape& shape, Rng& rng) {
  Element h = random_positive(shape, rng);
  return State((1.0 / trace(h).real()) * h);
}

State random_degenerate_state(const AlgebraShape& shape, Rng& rng) {
  std::vector<Matrix> blocks;
  bool dropped = false;
  int total_rank = 0;
  for (int k = 0; k < shape.blocks(); ++k) {
    int n = shape.dim(k);
    int r = n;
    if (n > 1) {
      r = rng.uniform_int(1, n - 1);
      dropped = true;
    } else if (!dropped && k + 1 == shape.blocks() && shape.blocks() > 1) {
      r = 0;  // all blocks are 1x1: empty the last one instead
    }
    total_rank += r;
    Matrix b(n, std::max(r, 1));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < std::max(r, 1); ++j) b(i, j) = rng.cnormal();
    Matrix h = r == 0 ? Matrix::Zero(n, n).eval() : (b * b.adjoint()).eval();
    blocks.push_back(0.5 * (h + h.adjoint().eval()));
  }
  if (total_rank == 0) blocks[0](0, 0) = 1.0;  // keep the mass positive
  Element h(shape, std::move(blocks));
  return State((rng.uniform(0.5, 2.0) / trace(h).real()) * h);
}

State random_dominated_state(const State& phi, Rng& rng) {
  const AlgebraShape& shape = phi.shape();
  const Element& s = phi.support_projection();
  // compress a random positive element into s(phi); sometimes cut the rank
  // further so the dominance is strict
  Element a = random_element(shape, rng);
  Element c = s * a;
  if (rng.uniform() < 0.5) {
    Element p = random_projection(
        shape,
        [&] {
          std::vector<int> ranks;
          for (int k = 0; k < shape.blocks(); ++k) {
            int r = block_rank(s, k);
            ranks.push_back(r > 1 && rng.uniform() < 0.5 ? r - 1 : r);
          }
          return ranks;
        }(),
        rng);
    c = s * p * a;
  }
  Element h = (c * c.adjoint()).hermitized();
  double t = trace(h).real();
  if (!(t > 1e-8)) {
    // degenerate draw; fall back to the plain compression
    h = ((s * a) * (s * a).adjoint()).hermitized();
    t = trace(h).real();
  }
  return State((rng.uniform(0.5, 2.0) / t) * h);
}

}  // namespace relmod
