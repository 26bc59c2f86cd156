#include "relmod/entropy.hpp"

#include <cmath>
#include <stdexcept>

#include "relmod/gns.hpp"

namespace relmod {

namespace {

struct PairingSums {
  double total = 0;        // ||k xi||^2
  double zero_weight = 0;  // weight on alpha_i gamma_j = 0
};

PairingSums weight_sums(const std::vector<PairingTerm>& terms) {
  PairingSums s;
  for (const auto& t : terms) {
    s.total += t.weight;
    if (t.alpha <= 0 || t.gamma <= 0) s.zero_weight += t.weight;
  }
  return s;
}

bool diverges(const PairingSums& s) {
  return s.zero_weight > kDivergenceTol * std::max(1.0, s.total);
}

// tau(h (1 - s)) for a positive h: the log-weight that a density places
// outside a support projection.
double weight_outside(const Element& h, const Element& supp) {
  Element rest = h - supp * h * supp;
  return trace(rest).real();
}

double aux_scale(const Element& h) { return std::max(1.0, trace(h).real()); }

}  // namespace

std::string family_name(const QuasiFamily& f) {
  return std::visit(
      [](const auto& fam) -> std::string {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, NegLog>) return "neg_log";
        else if constexpr (std::is_same_v<T, PowerFamily>) return "power";
        else if constexpr (std::is_same_v<T, TLogT>) return "t_log_t";
        else if constexpr (std::is_same_v<T, AffineFamily>) return "affine";
        else return "skew";
      },
      f);
}

double segal_entropy(const State& omega) {
  double acc = 0;
  for (int k = 0; k < omega.shape().blocks(); ++k) {
    const auto& vals = omega.block_eigenvalues()[k];
    for (int i = 0; i < vals.size(); ++i)
      if (vals[i] > 0) acc += omega.shape().weight(k) * vals[i] * std::log(vals[i]);
  }
  return acc;
}

bool support_dominated(const State& omega, const State& phi) {
  const Element& so = omega.support_projection();
  const Element& sp = phi.support_projection();
  return inf_norm(so - sp * so) <= kSupportDomTol;
}

double araki_relative_entropy(const State& phi, const State& omega, double group_tol) {
  return quasi_entropy_generic(NegLog{}, Element::identity(phi.shape()), phi, omega, group_tol);
}

double umegaki_information(const State& omega, const State& phi) {
  if (omega.shape() != phi.shape())
    throw std::invalid_argument("umegaki_information: shape mismatch");
  if (!support_dominated(omega, phi)) return kInf;
  Element log_omega = omega.apply_spectrum([](double t) { return std::log(t); }, 0.0);
  Element log_phi = phi.apply_spectrum([](double t) { return std::log(t); }, 0.0);
  return expectation(omega, log_omega) - expectation(omega, log_phi);
}

double quasi_entropy_generic(const QuasiFamily& f, const Element& k, const State& phi,
                             const State& omega, double group_tol) {
  if (phi.shape() != omega.shape() || k.shape() != phi.shape())
    throw std::invalid_argument("quasi_entropy: shape mismatch");

  // skew is the t - t^p family of Delta(phi, phi); omega is not consulted
  const bool skew = std::holds_alternative<SkewFamily>(f);
  const State& base = skew ? phi : omega;
  RelativeModular delta = RelativeModular::build(phi, base, group_tol);
  GnsVector xi{k * base.sqrt()};
  auto terms = delta.pairing(xi);
  PairingSums sums = weight_sums(terms);

  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, NegLog>) {
          if (diverges(sums)) return kInf;
          double acc = 0;
          for (const auto& t : terms)
            if (t.alpha > 0 && t.gamma > 0) acc -= std::log(t.alpha * t.gamma) * t.weight;
          return acc;
        } else if constexpr (std::is_same_v<T, PowerFamily>) {
          if (!(fam.alpha > 0) || !(fam.alpha <= 1))
            throw std::invalid_argument("power family needs alpha in (0, 1]");
          double acc = 0;
          for (const auto& t : terms)
            if (t.alpha > 0 && t.gamma > 0)
              acc += std::pow(t.alpha * t.gamma, fam.alpha) * t.weight;
          return acc;
        } else if constexpr (std::is_same_v<T, TLogT>) {
          double acc = 0;  // t log t -> 0 at t = 0, so zero pairs drop out
          for (const auto& t : terms)
            if (t.alpha > 0 && t.gamma > 0) {
              double mu = t.alpha * t.gamma;
              acc += mu * std::log(mu) * t.weight;
            }
          return acc;
        } else if constexpr (std::is_same_v<T, AffineFamily>) {
          double first = 0;
          for (const auto& t : terms)
            if (t.alpha > 0 && t.gamma > 0) first += t.alpha * t.gamma * t.weight;
          return fam.a * first + fam.b * sums.total;
        } else {  // SkewFamily
          if (!(fam.p > 0) || !(fam.p < 1))
            throw std::invalid_argument("skew family needs p in (0, 1)");
          double acc = 0;
          for (const auto& t : terms)
            if (t.alpha > 0 && t.gamma > 0) {
              double mu = t.alpha * t.gamma;
              acc += (mu - std::pow(mu, fam.p)) * t.weight;
            }
          return acc;
        }
      },
      f);
}

double quasi_entropy_closed(const QuasiFamily& f, const Element& k, const State& phi,
                            const State& omega) {
  if (phi.shape() != omega.shape() || k.shape() != phi.shape())
    throw std::invalid_argument("quasi_entropy: shape mismatch");

  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, NegLog>) {
          // rho(log h_omega) - (k omega k*)(log h_phi), h_rho = |k h_omega^{1/2}|^2
          Element z = k * omega.sqrt();
          Element h_rho = psd_clip(z.adjoint() * z);
          Element h_kwk = psd_clip(k * omega.density() * k.adjoint());
          double w1 = weight_outside(h_rho, omega.support_projection());
          double w2 = weight_outside(h_kwk, phi.support_projection());
          if (w1 > kDivergenceTol * aux_scale(h_rho)) return -kInf;
          if (w2 > kDivergenceTol * aux_scale(h_kwk)) return kInf;
          Element log_omega = omega.apply_spectrum([](double t) { return std::log(t); }, 0.0);
          Element log_phi = phi.apply_spectrum([](double t) { return std::log(t); }, 0.0);
          return trace(h_rho * log_omega).real() - trace(h_kwk * log_phi).real();
        } else if constexpr (std::is_same_v<T, PowerFamily>) {
          if (!(fam.alpha > 0) || !(fam.alpha <= 1))
            throw std::invalid_argument("power family needs alpha in (0, 1]");
          return trace(omega.power(1 - fam.alpha) * k.adjoint() * phi.power(fam.alpha) * k).real();
        } else if constexpr (std::is_same_v<T, TLogT>) {
          // rho1(log h_phi) - rho2(log h_omega),
          // h_rho1 = |k* h_phi^{1/2}|^2, h_rho2 = |h_phi^{1/2} k|^2
          Element z1 = k.adjoint() * phi.sqrt();
          Element z2 = phi.sqrt() * k;
          Element h1 = psd_clip(z1.adjoint() * z1);
          Element h2 = psd_clip(z2.adjoint() * z2);
          double w1 = weight_outside(h1, phi.support_projection());
          double w2 = weight_outside(h2, omega.support_projection());
          if (w1 > kDivergenceTol * aux_scale(h1)) return -kInf;
          if (w2 > kDivergenceTol * aux_scale(h2)) return kInf;
          Element log_phi = phi.apply_spectrum([](double t) { return std::log(t); }, 0.0);
          Element log_omega = omega.apply_spectrum([](double t) { return std::log(t); }, 0.0);
          return trace(h1 * log_phi).real() - trace(h2 * log_omega).real();
        } else if constexpr (std::is_same_v<T, AffineFamily>) {
          double first = trace(phi.density() * k * k.adjoint()).real();
          double second = trace(omega.density() * k.adjoint() * k).real();
          return fam.a * first + fam.b * second;
        } else {  // SkewFamily
          if (!(fam.p > 0) || !(fam.p < 1))
            throw std::invalid_argument("skew family needs p in (0, 1)");
          double first = trace(phi.density() * k * k.adjoint()).real();
          double second =
              trace(phi.power(1 - fam.p) * k.adjoint() * phi.power(fam.p) * k).real();
          return first - second;
        }
      },
      f);
}

namespace {
void check_renyi_alpha(const State& omega, const State& phi, double alpha) {
  if (!std::isfinite(alpha) || alpha < 0)
    throw std::invalid_argument("renyi: alpha must be finite and nonnegative");
  if (alpha == 1.0) throw std::invalid_argument("renyi: alpha = 1 is excluded");
  if (alpha > 1.0 && !support_dominated(omega, phi))
    throw std::domain_error("renyi: alpha > 1 requires s(omega) <= s(phi)");
}
}  // namespace

double renyi_relative_entropy(const State& omega, const State& phi, double alpha) {
  if (omega.shape() != phi.shape()) throw std::invalid_argument("renyi: shape mismatch");
  check_renyi_alpha(omega, phi, alpha);
  double t = trace(phi.power(1 - alpha) * omega.power(alpha)).real();
  return std::log(t) / (alpha - 1);  // t = 0 (orthogonal supports) gives +inf
}

double renyi_relative_entropy_spectral(const State& omega, const State& phi, double alpha,
                                       double group_tol) {
  if (omega.shape() != phi.shape()) throw std::invalid_argument("renyi: shape mismatch");
  check_renyi_alpha(omega, phi, alpha);
  RelativeModular delta = RelativeModular::build(phi, omega, group_tol);
  GnsVector xi{omega.sqrt()};
  double t = 0;
  for (const auto& term : delta.pairing(xi))
    if (term.alpha > 0 && term.gamma > 0)
      t += std::pow(term.alpha * term.gamma, 1 - alpha) * term.weight;
  return std::log(t) / (alpha - 1);
}

TraceCommutation trace_commutation_check(const Element& x, const Element& y, double p, double q) {
  auto conj_exp = [](double a) { return std::isinf(a) ? 0.0 : 1.0 / a; };
  bool p_ok = p >= 1 || (std::isinf(p) && p > 0);
  bool q_ok = q >= 1 || (std::isinf(q) && q > 0);
  if (!p_ok || !q_ok || std::abs(conj_exp(p) + conj_exp(q) - 1.0) > 1e-12)
    throw std::invalid_argument("trace_commutation_check: exponents must satisfy 1/p + 1/q = 1");
  Complex lhs = trace(x * y);
  Complex rhs = trace(y * x);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

EntropyReport make_entropy_report(const State& phi, const State& omega,
                                  const std::optional<Element>& k,
                                  const std::vector<double>& renyi_alphas,
                                  const std::vector<QuasiFamily>& families,
                                  double group_tol) {
  EntropyReport r;
  r.segal_omega = segal_entropy(omega);
  r.support_dominance = support_dominated(omega, phi);
  r.araki = araki_relative_entropy(phi, omega, group_tol);
  r.umegaki = umegaki_information(omega, phi);
  for (double alpha : renyi_alphas)
    r.renyi.emplace_back(alpha, renyi_relative_entropy(omega, phi, alpha));
  Element kk = k.value_or(Element::identity(phi.shape()));
  for (const auto& fam : families)
    r.quasi.push_back({fam, quasi_entropy_generic(fam, kk, phi, omega, group_tol),
                       quasi_entropy_closed(fam, kk, phi, omega)});
  return r;
}

}  // namespace relmod
