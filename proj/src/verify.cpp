#include "relmod/verify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

#include "relmod/entropy.hpp"
#include "relmod/gns.hpp"
#include "relmod/random.hpp"
#include "relmod/report.hpp"

namespace relmod {

namespace {

constexpr double kSlack = 1e-9;  // multiplicative slack for inequality checks

struct Acc {
  int failures = 0;
  int skipped = 0;
  double max_residual = 0.0;
  std::string note;

  // A NaN residual never satisfies the bound, so it counts as a failure.
  void observe(double residual, double bound) {
    if (std::isfinite(residual)) max_residual = std::max(max_residual, residual);
    if (!(residual <= bound)) ++failures;
  }
  void require(bool ok) {
    if (!ok) ++failures;
  }
  void skip(const std::string& why) {
    ++skipped;
    if (note.empty()) note = why;
  }
};

using FamilyFn = std::function<void(const AlgebraShape&, Rng&, Acc&)>;

struct Family {
  const char* name;
  FamilyFn fn;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

// Normalized overshoot of lhs over rhs; zero when the inequality holds with
// margin.
double excess(double lhs, double rhs) {
  if (rhs <= 0.0) return lhs <= 1e-12 ? 0.0 : kInf;
  return std::max(0.0, lhs / rhs - 1.0);
}

double diff_inf(const Element& a, const Element& b) { return inf_norm(a - b); }

double vdiff(const GnsVector& a, const GnsVector& b) {
  return norm(GnsVector{a.carrier - b.carrier});
}

// State with spectrum on a fixed coarse grid: exact zeros, gaps >= 0.25. Keeps
// dense support oracles away from threshold ambiguity.
State lattice_state(const AlgebraShape& shape, Rng& rng, bool allow_zero) {
  static const double kLevels[] = {0.25, 0.5, 1.0, 2.0};
  std::vector<Matrix> blocks;
  bool any_positive = false;
  for (int k = 0; k < shape.blocks(); ++k) {
    const int n = shape.dim(k);
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) {
      if (allow_zero && rng.uniform() < 0.35) {
        d(i) = 0.0;
      } else {
        d(i) = kLevels[rng.uniform_int(0, 3)];
        any_positive = true;
      }
    }
    if (k == shape.blocks() - 1 && !any_positive) {
      d(0) = 1.0;
      any_positive = true;
    }
    blocks.push_back(d.asDiagonal());
  }
  Element diag(shape, std::move(blocks));
  Element u = random_unitary(shape, rng);
  return State((u * diag * u.adjoint()).hermitized());
}

GnsVector random_vector(const AlgebraShape& shape, Rng& rng) {
  return GnsVector{random_element(shape, rng)};
}

// ---------------------------------------------------------------- algebra --

void check_trace_linearity(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element x = random_element(shape, rng);
  Element y = random_element(shape, rng);
  Complex c = rng.cnormal();
  Complex lhs = trace(c * x + y);
  Complex rhs = c * trace(x) + trace(y);
  acc.observe(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), 1e-12);
  acc.observe(std::abs(trace(x.adjoint()) - std::conj(trace(x))), 1e-12);
}

void check_traciality(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element x = random_element(shape, rng);
  Element y = random_element(shape, rng);
  Complex xy = trace(x * y);
  Complex yx = trace(y * x);
  acc.observe(std::abs(xy - yx) / std::max(1.0, std::abs(xy)), 1e-10);
}

void check_faithfulness(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element x = random_element(shape, rng);
  Complex q = trace(x.adjoint() * x);
  double exact = 0.0;
  for (int k = 0; k < shape.blocks(); ++k) exact += shape.weight(k) * x.block(k).squaredNorm();
  acc.observe(std::abs(q.real() - exact) / std::max(1.0, exact), 1e-12);
  acc.observe(std::abs(q.imag()), 1e-12);
  acc.require(q.real() > 0.0);
  acc.require(std::abs(trace(Element(shape))) == 0.0);
}

void check_p_norm_axioms(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  static const double kPs[] = {1.0, 2.0, 3.0, 4.0, kInf};
  Element x = random_element(shape, rng);
  Element y = random_element(shape, rng);
  double c = rng.uniform(-3.0, 3.0);
  for (double p : kPs) {
    double nx = p_norm(x, p);
    double ny = p_norm(y, p);
    acc.observe(rel(p_norm(c * x, p), std::abs(c) * nx), 1e-10);
    acc.observe(excess(p_norm(x + y, p), (nx + ny) * (1.0 + kSlack)), 0.0);
    acc.observe(rel(p_norm(x.adjoint(), p), nx), 1e-10);
  }
  double n2 = p_norm(x, 2.0);
  acc.observe(rel(n2 * n2, trace(x.adjoint() * x).real()), 1e-10);
}

void check_holder(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  static const double kTriples[][3] = {{2, 2, 1}, {4, 4, 2}, {3, 1.5, 1}};
  Element x = random_element(shape, rng);
  Element y = random_element(shape, rng);
  for (const auto& t : kTriples) {
    double lhs = p_norm(x * y, t[2]);
    double rhs = p_norm(x, t[0]) * p_norm(y, t[1]);
    acc.observe(excess(lhs, rhs), kSlack);
  }
}

void check_chebyshev(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element h = random_positive(shape, rng);
  double top = inf_norm(h);
  double eps = rng.uniform(0.05, 1.5) * std::max(top, 1e-6);
  for (double p : {1.0, 2.0, 4.0}) {
    double lhs = tail_trace(h, eps);
    double rhs = std::pow(p_norm(h, p), p) / std::pow(eps, p);
    acc.observe(excess(lhs, rhs), kSlack);
  }
}

void check_truncation(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element x = random_hermitian(shape, rng);
  double top = inf_norm(x);
  double n = rng.uniform(0.1, 1.2) * std::max(top, 1e-6);
  Element xn = truncate(x, n);
  acc.observe(excess(inf_norm(xn), n), kSlack);
  acc.observe(diff_inf(truncate(x, top * (1.0 + 1e-6) + 1e-9), x) / std::max(1.0, top), 1e-10);
  acc.observe(diff_inf(truncate(xn, n), xn) / std::max(1.0, top), 1e-10);
  acc.observe(diff_inf(x * xn, xn * x) / std::max(1.0, top * top), 1e-10);
}

void check_approximation(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element x = random_hermitian(shape, rng);
  Element d = random_hermitian(shape, rng);
  double d2 = p_norm(d, 2.0);
  for (int n : {1, 2, 6, 12}) {
    Element xn = x + std::ldexp(1.0, -n) * d;
    acc.observe(rel(p_norm(xn - x, 2.0), std::ldexp(d2, -n)), 1e-10);
  }
  Element far = x + std::ldexp(1.0, -40) * d;
  acc.observe(p_norm(far - x, 1.0), 1e-9 * std::max(1.0, p_norm(d, 1.0)));
  acc.observe(std::abs(trace(far) - trace(x)), 1e-9 * std::max(1.0, std::abs(trace(d))));
}

void check_spectral_reconstruction(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element x = random_hermitian(shape, rng);
  double scale = std::max(1.0, inf_norm(x));
  SpectralDecomposition sd = spectral_decompose(x, kGroupTol);
  Element rebuilt(shape);
  Element sum(shape);
  for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) {
    rebuilt = rebuilt + sd.eigenvalues[i] * sd.projections[i];
    sum = sum + sd.projections[i];
    acc.observe(diff_inf(sd.projections[i] * sd.projections[i], sd.projections[i]), 1e-9);
    for (std::size_t j = i + 1; j < sd.eigenvalues.size(); ++j)
      acc.observe(inf_norm(sd.projections[i] * sd.projections[j]), 1e-9);
  }
  acc.observe(diff_inf(rebuilt, x) / scale, 1e-9);
  acc.observe(diff_inf(sum, Element::identity(shape)), 1e-9);

  // Degenerate integer spectrum: grouping must recover exact multiplicities.
  std::vector<std::vector<double>> entries(static_cast<std::size_t>(shape.blocks()));
  std::vector<int> count(4, 0);
  for (int k = 0; k < shape.blocks(); ++k)
    for (int i = 0; i < shape.dim(k); ++i) {
      int level = rng.uniform_int(1, 3);
      entries[static_cast<std::size_t>(k)].push_back(static_cast<double>(level));
      ++count[level];
    }
  Element u = random_unitary(shape, rng);
  Element deg = (u * Element::diagonal(shape, entries) * u.adjoint()).hermitized();
  SpectralDecomposition sdd = spectral_decompose(deg, kGroupTol);
  int expected_groups = (count[1] > 0) + (count[2] > 0) + (count[3] > 0);
  acc.require(sdd.size() == expected_groups);
  for (std::size_t i = 0; i < sdd.eigenvalues.size(); ++i) {
    int level = static_cast<int>(std::lround(sdd.eigenvalues[i]));
    int mult = 0;
    for (int k = 0; k < shape.blocks(); ++k) mult += block_rank(sdd.projections[i], k);
    acc.require(level >= 1 && level <= 3 && mult == count[level]);
  }
}

void check_functional_calculus(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element h = random_positive(shape, rng) + 0.1 * Element::identity(shape);
  double scale = std::max(1.0, inf_norm(h));
  Element back = func_calc(func_calc(h, [](double t) { return std::log(t); }),
                           [](double t) { return std::exp(t); }, 1.0);
  acc.observe(diff_inf(back, h) / scale, 1e-9);

  Element x = random_hermitian(shape, rng);
  acc.observe(diff_inf(func_calc(x, [](double t) { return t; }), x) / scale, 1e-10);
  Element fs = func_calc(x, [](double t) { return std::sin(t); });
  Element fc = func_calc(x, [](double t) { return std::cos(t); }, 1.0);
  Element fsc = func_calc(x, [](double t) { return std::sin(t) * std::cos(t); });
  acc.observe(diff_inf(fs * fc, fsc), 1e-9);

  Element hd = random_degenerate_state(shape, rng).density();
  Element ones = func_calc(hd, [](double) { return 1.0; }, 0.0);
  acc.observe(diff_inf(ones, support(hd)), 1e-9);
}

void check_w_transform(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element h = random_positive(shape, rng);
  Element ht = w_transform(h);
  acc.observe(diff_inf(h * ht * h, h) / std::max(1.0, inf_norm(h)), 1e-9);
  acc.observe(diff_inf(ht * h * ht, ht) / std::max(1.0, inf_norm(ht)), 1e-9);

  Element g = random_positive(shape, rng) + rng.uniform(0.1, 1.0) * Element::identity(shape);
  acc.observe(diff_inf(w_transform(g) * g, Element::identity(shape)), 1e-9);

  Element hd = lattice_state(shape, rng, true).density();
  acc.observe(diff_inf(w_transform(hd) * hd, support(hd)), 1e-9);
}

void check_psd_clip(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element h = random_positive(shape, rng);
  double scale = std::max(1.0, inf_norm(h));
  acc.observe(diff_inf(psd_clip(h), h) / scale, 1e-10);

  Element s = support(h);
  acc.observe(diff_inf(s * s, s), 1e-10);
  acc.observe(diff_inf(s * h, h) / scale, 1e-10);

  Element near = h - 1e-13 * Element::identity(shape);
  SpectralDecomposition sd = spectral_decompose(psd_clip(near), kGroupTol);
  for (double lambda : sd.eigenvalues) acc.require(lambda >= -1e-12);
}

// -------------------------------------------------------------------- gns --

void check_inner_product(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  GnsVector a = random_vector(shape, rng);
  GnsVector b = random_vector(shape, rng);
  Complex ab = inner(a, b);
  acc.observe(std::abs(ab - std::conj(inner(b, a))) / std::max(1.0, std::abs(ab)), 1e-12);
  double na = norm(a);
  Complex aa = inner(a, a);
  acc.observe(rel(aa.real(), na * na), 1e-12);
  acc.observe(std::abs(aa.imag()), 1e-12);
  acc.observe(excess(std::abs(ab), na * norm(b)), kSlack);
  Complex c = rng.cnormal();
  acc.observe(std::abs(inner(a, GnsVector{c * b.carrier}) - c * ab), 1e-11);
}

void check_left_right_commute(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element x = random_element(shape, rng);
  Element y = random_element(shape, rng);
  GnsVector v = random_vector(shape, rng);
  double scale = std::max(1.0, inf_norm(x) * inf_norm(y) * norm(v));
  acc.observe(vdiff(apply_left(x, apply_right(y, v)), apply_right(y, apply_left(x, v))) / scale,
              1e-11);
}

void check_representation(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element x = random_element(shape, rng);
  Element y = random_element(shape, rng);
  GnsVector v = random_vector(shape, rng);
  double scale = std::max(1.0, inf_norm(x) * inf_norm(y) * norm(v));
  acc.observe(vdiff(apply_left(x * y, v), apply_left(x, apply_left(y, v))) / scale, 1e-11);
  acc.observe(vdiff(apply_right(x * y, v), apply_right(y, apply_right(x, v))) / scale, 1e-11);
  acc.observe(vdiff(apply_left(Element::identity(shape), v), v), 1e-14);

  GnsVector w = random_vector(shape, rng);
  Complex lhs = inner(apply_left(x, w), v);
  Complex rhs = inner(w, apply_left(x.adjoint(), v));
  acc.observe(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), 1e-11);
}

void check_coordinates(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  GnsVector v = random_vector(shape, rng);
  Eigen::VectorXcd c = gns_coordinates(v);
  acc.observe(vdiff(gns_from_coordinates(shape, c), v) / std::max(1.0, norm(v)), 1e-12);
  acc.observe(rel(c.norm(), norm(v)), 1e-12);

  if (shape.gns_dim() > kOracleCap) {
    acc.skip("dense oracle skipped: D exceeds cap");
    return;
  }
  Element x = random_element(shape, rng);
  Element y = random_element(shape, rng);
  double scale = std::max(1.0, inf_norm(x) * inf_norm(y) * norm(v));
  Eigen::VectorXcd lhs = dense_sandwich(x, y) * c;
  Eigen::VectorXcd rhs = gns_coordinates(GnsVector{x * v.carrier * y});
  acc.observe((lhs - rhs).norm() / scale, 1e-11);
  acc.observe((dense_left(x) * c - gns_coordinates(apply_left(x, v))).norm() / scale, 1e-11);
  acc.observe((dense_right(y) * c - gns_coordinates(apply_right(y, v))).norm() / scale, 1e-11);
}

void check_vector_support(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  Element b = random_element(shape, rng);
  Element a = (b * b.adjoint()).hermitized();
  GnsVector v{a};
  Element s = vector_support_left(v, kSupportEta);
  acc.observe(vdiff(apply_left(s, v), v) / std::max(1.0, norm(v)), 1e-10);
  Element x = random_hermitian(shape, rng);
  Element negative = x - (3.0 + inf_norm(x)) * Element::identity(shape);
  bool threw = false;
  try {
    (void)vector_support_left(GnsVector{negative}, kSupportEta);
  } catch (const std::domain_error&) {
    threw = true;
  }
  acc.require(threw);
}

void check_expectation(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State rho = random_state(shape, rng);
  Element x = random_hermitian(shape, rng);
  double via_sqrt = expectation(rho, x);
  double via_trace = trace(x * rho.density()).real();
  acc.observe(rel(via_sqrt, via_trace), 1e-10);
  Element b = random_element(shape, rng);
  acc.require(expectation(rho, (b * b.adjoint()).hermitized()) >= -1e-12);
  acc.observe(rel(expectation(rho, Element::identity(shape)), rho.mass()), 1e-12);
}

// ---------------------------------------------------------------- modular --

void check_basic_grid(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State phi = random_state(shape, rng);
  State omega = (rng.uniform() < 0.5) ? random_state(shape, rng)
                                      : random_degenerate_state(shape, rng);
  RelativeModular delta = RelativeModular::build(phi, omega);
  Element x = random_element(shape, rng);
  GnsVector v{x * omega.sqrt()};
  for (double s : {0.0, 0.1, 0.25, 0.5}) {
    GnsVector lhs = delta.apply_power(s, v);
    GnsVector rhs{phi.power(s) * x * omega.power(0.5 - s)};
    acc.observe(vdiff(lhs, rhs) / (1.0 + inf_norm(x)), 1e-9);
  }
}

void check_power_law(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State phi = random_state(shape, rng);
  State omega = random_state(shape, rng);
  RelativeModular delta = RelativeModular::build(phi, omega);
  GnsVector v = random_vector(shape, rng);
  double scale = std::max(1.0, norm(delta.apply_power(0.9, v)) + norm(v));
  double s = rng.uniform(0.05, 0.45);
  double t = rng.uniform(0.05, 0.45);
  acc.observe(vdiff(delta.apply_power(s, delta.apply_power(t, v)), delta.apply_power(s + t, v)) /
                  scale,
              1e-9);
  acc.observe(vdiff(delta.apply_power(0.0, delta.apply_power(s, v)),
                    delta.apply_power(s, delta.apply_power(0.0, v))) /
                  scale,
              1e-9);
}

void check_kernel_rule(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State phi = (rng.uniform() < 0.5) ? random_state(shape, rng)
                                    : random_degenerate_state(shape, rng);
  State omega = (rng.uniform() < 0.5) ? random_state(shape, rng)
                                      : random_degenerate_state(shape, rng);
  RelativeModular delta = RelativeModular::build(phi, omega);
  GnsVector v = random_vector(shape, rng);
  GnsVector direct{phi.support_projection() * v.carrier * omega.support_projection()};
  double scale = std::max(1.0, norm(v));
  acc.observe(vdiff(delta.apply_power(0.0, v), direct) / scale, 1e-10);
  acc.observe(vdiff(delta.apply_support(v), direct) / scale, 1e-10);
  acc.observe(vdiff(delta.apply_support(delta.apply_support(v)), delta.apply_support(v)) / scale,
              1e-10);
}

void check_pairing_oracle(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State phi = random_state(shape, rng);
  State omega = (rng.uniform() < 0.5) ? random_state(shape, rng)
                                      : random_degenerate_state(shape, rng);
  RelativeModular delta = RelativeModular::build(phi, omega);

  GnsVector v = random_vector(shape, rng);
  std::vector<PairingTerm> terms = delta.pairing(v);
  double total = 0.0;
  double quad = 0.0;
  for (const PairingTerm& t : terms) {
    total += t.weight;
    quad += t.alpha * t.gamma * t.weight;
  }
  double n = norm(v);
  acc.observe(rel(total, n * n), 1e-10);
  double direct = inner(v, delta.apply(v)).real();
  acc.observe(rel(quad, direct), 1e-9);

  if (shape.gns_dim() > kOracleCap) {
    acc.skip("dense oracle skipped: D exceeds cap");
    return;
  }
  std::vector<double> lam = delta.eigenvalues();
  Eigen::SelfAdjointEigenSolver<Matrix> es(delta.dense_matrix(kOracleCap));
  double top = std::max(1.0, std::abs(lam.empty() ? 0.0 : lam.back()));
  acc.require(static_cast<int>(lam.size()) == shape.gns_dim());
  for (std::size_t i = 0; i < lam.size(); ++i)
    acc.observe(std::abs(lam[i] - es.eigenvalues()(static_cast<Eigen::Index>(i))) / top, 1e-9);
}

void check_dense_psd(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  if (shape.gns_dim() > kOracleCap) {
    acc.skip("dense oracle skipped: D exceeds cap");
    return;
  }
  State phi = random_state(shape, rng);
  State omega = random_degenerate_state(shape, rng);
  RelativeModular delta = RelativeModular::build(phi, omega);
  Matrix d = delta.dense_matrix(kOracleCap);
  double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  acc.observe((d - d.adjoint()).cwiseAbs().maxCoeff() / scale, 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(d);
  acc.require(es.eigenvalues().minCoeff() >= -1e-10 * scale);
}

void check_polar_decomposition(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State phi = random_state(shape, rng);
  State omega = (rng.uniform() < 0.5) ? random_state(shape, rng)
                                      : random_degenerate_state(shape, rng);
  RelativeModular delta = RelativeModular::build(phi, omega);
  Element x = random_element(shape, rng);
  GnsVector v{x * omega.sqrt()};
  GnsVector s_direct = s_operator_apply(phi, omega, x);
  GnsVector s_polar = modular_j(delta.apply_power(0.5, v));
  acc.observe(vdiff(s_direct, s_polar) / std::max(1.0, norm(v)), 1e-10);
}

void check_j_structure(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  GnsVector v = random_vector(shape, rng);
  acc.require(vdiff(modular_j(modular_j(v)), v) == 0.0);

  Element b = random_element(shape, rng);
  GnsVector cone{(b * b.adjoint()).hermitized()};
  acc.require(vdiff(modular_j(cone), cone) == 0.0);

  GnsVector w = random_vector(shape, rng);
  Complex lhs = inner(modular_j(v), modular_j(w));
  Complex rhs = std::conj(inner(v, w));
  acc.observe(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)), 1e-12);
}

void check_support_oracle(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State phi = lattice_state(shape, rng, true);
  State omega = lattice_state(shape, rng, true);
  RelativeModular delta = RelativeModular::build(phi, omega);
  GnsVector v = random_vector(shape, rng);
  GnsVector direct = delta.apply_support(v);

  if (shape.gns_dim() > kOracleCap) {
    acc.skip("dense oracle skipped: D exceeds cap");
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(delta.dense_matrix(kOracleCap));
  double top = std::max(1.0, es.eigenvalues().maxCoeff());
  const double threshold = 1e-3 * top;  // lattice spectra keep a hard gap here
  Eigen::VectorXcd c = gns_coordinates(v);
  Eigen::VectorXcd projected = Eigen::VectorXcd::Zero(c.size());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) <= threshold) continue;
    Eigen::VectorXcd u = es.eigenvectors().col(i);
    projected += u * (u.adjoint() * c);
  }
  acc.observe((projected - gns_coordinates(direct)).norm() / std::max(1.0, norm(v)), 1e-9);
}

void check_estimate(const AlgebraShape& shape, Rng& rng, Acc& acc, bool first_branch) {
  State phi = (rng.uniform() < 0.7) ? random_state(shape, rng)
                                    : random_degenerate_state(shape, rng);
  State omega = (rng.uniform() < 0.7) ? random_state(shape, rng)
                                      : random_degenerate_state(shape, rng);
  Element z = random_element(shape, rng);
  double s = first_branch ? rng.uniform(0.01, 0.25) : rng.uniform(0.2501, 0.5);
  Element mid = omega.power(0.5 - s) * z.adjoint() * phi.power(2.0 * s) * z * omega.power(0.5 - s);
  double lhs = trace(mid).real();
  double zinf = inf_norm(z);
  double rhs;
  if (first_branch) {
    rhs = std::pow(phi.mass(), 2.0 * s) * std::pow(omega.mass(), 0.5 - 2.0 * s) * zinf *
          p_norm(z * omega.sqrt(), 2.0);
  } else {
    rhs = std::pow(phi.mass(), 2.0 * s - 0.5) * std::pow(omega.mass(), 1.0 - 2.0 * s) * zinf *
          p_norm(phi.sqrt() * z, 2.0);
  }
  acc.observe(excess(lhs, rhs), kSlack);
}

// ---------------------------------------------------------------- entropy --

void check_araki_umegaki(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State phi = random_state(shape, rng);
  State omega = (rng.uniform() < 0.5) ? random_state(shape, rng)
                                      : random_dominated_state(phi, rng);
  double s = araki_relative_entropy(phi, omega);
  double i = umegaki_information(omega, phi);
  acc.require(std::isfinite(s) && std::isfinite(i));
  acc.observe(rel(s, i), 1e-8);

  State phi_deg = random_degenerate_state(shape, rng);
  State omega_full = random_state(shape, rng);
  if (inf_norm(phi_deg.support_projection() - Element::identity(shape)) > 0.5) {
    acc.require(std::isinf(araki_relative_entropy(phi_deg, omega_full)));
    acc.require(std::isinf(umegaki_information(omega_full, phi_deg)));
  }
}

void check_double_sum(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State phi = random_state(shape, rng);
  State omega = random_state(shape, rng);
  double s = araki_relative_entropy(phi, omega);

  SpectralDecomposition alpha = phi.clipped_spectrum(kGroupTol);
  SpectralDecomposition beta = omega.clipped_spectrum(kGroupTol);
  double ds = 0.0;
  for (std::size_t j = 0; j < beta.eigenvalues.size(); ++j) {
    const double b = beta.eigenvalues[j];
    if (b <= 0.0) continue;
    for (std::size_t i = 0; i < alpha.eigenvalues.size(); ++i) {
      const double a = alpha.eigenvalues[i];
      if (a <= 0.0) continue;
      ds += b * std::log(b / a) * trace(alpha.projections[i] * beta.projections[j]).real();
    }
  }
  acc.observe(rel(s, ds), 1e-9);
}

void check_quasi_routes(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  std::vector<QuasiFamily> families = {
      NegLog{}, PowerFamily{rng.uniform(0.1, 1.0)}, TLogT{},
      AffineFamily{rng.normal(), rng.normal()}, SkewFamily{rng.uniform(0.1, 0.9)}};
  State phi = random_state(shape, rng);
  State omega = random_state(shape, rng);
  Element k = random_element(shape, rng);
  for (const QuasiFamily& f : families) {
    double generic = quasi_entropy_generic(f, k, phi, omega);
    double closed = quasi_entropy_closed(f, k, phi, omega);
    acc.require(std::isfinite(generic) && std::isfinite(closed));
    acc.observe(rel(generic, closed), 1e-8);
  }

  // Degenerate omega keeps both routes of these two families well defined.
  State omega_deg = random_degenerate_state(shape, rng);
  for (const QuasiFamily& f :
       {QuasiFamily{NegLog{}}, QuasiFamily{PowerFamily{rng.uniform(0.1, 1.0)}}}) {
    double generic = quasi_entropy_generic(f, k, phi, omega_deg);
    double closed = quasi_entropy_closed(f, k, phi, omega_deg);
    acc.require(std::isfinite(generic) && std::isfinite(closed));
    acc.observe(rel(generic, closed), 1e-8);
  }
}

void check_renyi_routes(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State phi = random_state(shape, rng);
  State omega = (rng.uniform() < 0.5) ? random_state(shape, rng)
                                      : random_degenerate_state(shape, rng);
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 0.9}) {
    double closed = renyi_relative_entropy(omega, phi, alpha);
    double spectral = renyi_relative_entropy_spectral(omega, phi, alpha);
    acc.observe(rel(closed, spectral), 1e-9);
  }

  State dominated = random_dominated_state(phi, rng);
  double closed = renyi_relative_entropy(dominated, phi, 1.5);
  double spectral = renyi_relative_entropy_spectral(dominated, phi, 1.5);
  acc.observe(rel(closed, spectral), 1e-9);

  bool threw = false;
  try {
    (void)renyi_relative_entropy(omega, phi, 1.0);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  acc.require(threw);
}

void check_segal_scaling(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  State rho = random_state(shape, rng);
  double c = rng.uniform(0.3, 3.0);
  double lhs = segal_entropy(State(c * rho.density()));
  double rhs = c * segal_entropy(rho) + c * std::log(c) * rho.mass();
  acc.observe(rel(lhs, rhs), 1e-10);
}

void check_trace_commutation(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  static const double kPairs[][2] = {{2, 2}, {4, 4.0 / 3.0}, {3, 1.5}, {1, kInf}};
  Element x = random_element(shape, rng);
  Element y = random_element(shape, rng);
  for (const auto& pq : kPairs) {
    TraceCommutation tc = trace_commutation_check(x, y, pq[0], pq[1]);
    acc.observe(tc.residual, 1e-10);
  }
}

void check_worked_example(const AlgebraShape& shape, Rng& rng, Acc& acc) {
  (void)shape;
  (void)rng;
  AlgebraShape two({2}, {1.0});
  State phi(Element::diagonal(two, {{0.75, 0.25}}));
  State omega(Element::diagonal(two, {{0.5, 0.5}}));
  acc.observe(std::abs(araki_relative_entropy(phi, omega) - 0.5 * std::log(4.0 / 3.0)), 1e-12);
  double expected_half = -2.0 * std::log(std::sqrt(0.375) + std::sqrt(0.125));
  acc.observe(std::abs(renyi_relative_entropy(omega, phi, 0.5) - expected_half), 1e-12);
  acc.observe(std::abs(segal_entropy(phi) - (0.75 * std::log(0.75) + 0.25 * std::log(0.25))),
              1e-12);
}

const std::vector<Family>& families() {
  static const std::vector<Family> kFamilies = {
      {"algebra.trace_linearity", check_trace_linearity},
      {"algebra.traciality", check_traciality},
      {"algebra.faithfulness", check_faithfulness},
      {"algebra.p_norm_axioms", check_p_norm_axioms},
      {"algebra.holder", check_holder},
      {"algebra.chebyshev", check_chebyshev},
      {"algebra.truncation", check_truncation},
      {"algebra.approximation", check_approximation},
      {"algebra.spectral_reconstruction", check_spectral_reconstruction},
      {"algebra.functional_calculus", check_functional_calculus},
      {"algebra.w_transform", check_w_transform},
      {"algebra.psd_clip", check_psd_clip},
      {"gns.inner_product", check_inner_product},
      {"gns.left_right_commute", check_left_right_commute},
      {"gns.representation", check_representation},
      {"gns.coordinates", check_coordinates},
      {"gns.vector_support", check_vector_support},
      {"gns.expectation", check_expectation},
      {"modular.basic_grid", check_basic_grid},
      {"modular.power_law", check_power_law},
      {"modular.kernel_rule", check_kernel_rule},
      {"modular.pairing_oracle", check_pairing_oracle},
      {"modular.dense_psd", check_dense_psd},
      {"modular.polar_decomposition", check_polar_decomposition},
      {"modular.j_structure", check_j_structure},
      {"modular.support_oracle", check_support_oracle},
      {"modular.estimate_i",
       [](const AlgebraShape& s, Rng& r, Acc& a) { check_estimate(s, r, a, true); }},
      {"modular.estimate_ii",
       [](const AlgebraShape& s, Rng& r, Acc& a) { check_estimate(s, r, a, false); }},
      {"entropy.araki_umegaki", check_araki_umegaki},
      {"entropy.double_sum", check_double_sum},
      {"entropy.quasi_routes", check_quasi_routes},
      {"entropy.renyi_routes", check_renyi_routes},
      {"entropy.segal_scaling", check_segal_scaling},
      {"entropy.trace_commutation", check_trace_commutation},
      {"entropy.worked_example", check_worked_example},
  };
  return kFamilies;
}

}  // namespace

std::vector<AlgebraShape> default_verify_shapes() {
  return {AlgebraShape({2}, {1.0}), AlgebraShape({3}, {1.0}), AlgebraShape({2, 2}, {1.0, 0.5})};
}

std::vector<CheckResult> run_verify(const VerifyOptions& options) {
  std::vector<CheckResult> results;
  if (options.trials <= 0) return results;
  const std::vector<AlgebraShape> shapes =
      options.shapes.empty() ? default_verify_shapes() : options.shapes;

  const std::vector<Family>& fams = families();
  for (std::size_t fi = 0; fi < fams.size(); ++fi) {
    CheckResult row;
    row.name = fams[fi].name;
    for (std::size_t si = 0; si < shapes.size(); ++si) {
      // Every (family, shape) pair owns a stream, so adding shapes or running
      // families out of order never shifts another pair's draws.
      Rng rng(mix_seed(options.seed, (fi + 1) * 1024 + si));
      Acc acc;
      for (int t = 0; t < options.trials; ++t) fams[fi].fn(shapes[si], rng, acc);
      row.trials += options.trials;
      row.failures += acc.failures;
      row.skipped += acc.skipped;
      row.max_residual = std::max(row.max_residual, acc.max_residual);
      if (row.note.empty()) row.note = acc.note;
    }
    results.push_back(std::move(row));
  }
  return results;
}

int total_failures(const std::vector<CheckResult>& results) {
  int total = 0;
  for (const CheckResult& r : results) total += r.failures;
  return total;
}

nlohmann::json verify_report(const std::vector<CheckResult>& results,
                             const VerifyOptions& options, bool with_timestamp) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& r : results) {
    nlohmann::json row;
    row["name"] = r.name;
    row["trials"] = r.trials;
    row["failures"] = r.failures;
    row["skipped"] = r.skipped;
    row["max_residual"] = json_number(r.max_residual);
    row["note"] = r.note;
    checks.push_back(std::move(row));
  }
  nlohmann::json report;
  report["command"] = "verify";
  report["seed"] = options.seed;
  report["trials"] = options.trials;
  nlohmann::json shapes = nlohmann::json::array();
  for (const AlgebraShape& s :
       (options.shapes.empty() ? default_verify_shapes() : options.shapes))
    shapes.push_back(s.to_string());
  report["shapes"] = std::move(shapes);
  report["checks"] = std::move(checks);
  report["failures_total"] = total_failures(results);
  report["status"] = total_failures(results) == 0 ? "pass" : "fail";
  if (with_timestamp) report["timestamp"] = utc_timestamp();
  return report;
}

}  // namespace relmod
