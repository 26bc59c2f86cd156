#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relmod/algebra.hpp"
#include "relmod/modular.hpp"

namespace relmod {

// Relative weight on zero-eigenvalue pairs above which a log-type quantity is
// declared divergent (the sentinel). Genuine kernel overlap carries weight of
// the order of the state mass; roundoff leakage sits near 1e-30.
inline constexpr double kDivergenceTol = 1e-10;

// ||s(omega) - s(phi) s(omega)|| gate for s(omega) <= s(phi).
inline constexpr double kSupportDomTol = 1e-9;

// Quasi-entropy function families f for S_f^k = <k xi | f(Delta) k xi>.
struct NegLog {};                           // f(t) = -log t
struct PowerFamily { double alpha = 0.5; }; // f(t) = t^alpha, alpha in (0, 1]
struct TLogT {};                            // f(t) = t log t
struct AffineFamily { double a = 0, b = 0; };  // f(t) = a t + b
struct SkewFamily { double p = 0.5; };      // f(t) = t - t^p at phi = omega, p in (0, 1)
using QuasiFamily = std::variant<NegLog, PowerFamily, TLogT, AffineFamily, SkewFamily>;

std::string family_name(const QuasiFamily& f);

double segal_entropy(const State& omega);  // tau(h log h), 0 log 0 = 0

bool support_dominated(const State& omega, const State& phi);  // s(omega) <= s(phi)

// Araki relative entropy via the spectral pairing of Delta(phi, omega):
// -sum log(alpha_i gamma_j) ||e_i h_omega^{1/2} f_j||^2. Returns +inf when
// weight falls on zero pairs, i.e. when s(omega) is not dominated by s(phi).
double araki_relative_entropy(const State& phi, const State& omega,
                              double group_tol = kGroupTol);

// Umegaki information I(omega, phi) = omega(log h_omega) - omega(log h_phi)
// through the symmetric expectation route; +inf without support dominance.
double umegaki_information(const State& omega, const State& phi);

// Spectral route: sum f(alpha_i gamma_j) ||e_i k h_omega^{1/2} f_j||^2.
// Log-type families return a +/-inf sentinel when weight sits on zero pairs.
// The skew family is a (phi, k) quantity and evaluates against Delta(phi, phi).
double quasi_entropy_generic(const QuasiFamily& f, const Element& k, const State& phi,
                             const State& omega, double group_tol = kGroupTol);

// Closed trace formulas for the same families, with explicit log-weight
// sentinel checks on the auxiliary densities where the formula takes a
// logarithm of a possibly degenerate density.
double quasi_entropy_closed(const QuasiFamily& f, const Element& k, const State& phi,
                            const State& omega);

// Renyi relative entropy S_alpha(omega, phi) = log tau(h_phi^{1-alpha} h_omega^alpha)/(alpha-1).
// alpha in [0, 1) is always accepted; alpha > 1 requires s(omega) <= s(phi);
// alpha = 1 is an error. The spectral form evaluates
// log <xi | Delta^{1-alpha} xi> / (alpha - 1) over the pairing.
double renyi_relative_entropy(const State& omega, const State& phi, double alpha);
double renyi_relative_entropy_spectral(const State& omega, const State& phi, double alpha,
                                       double group_tol = kGroupTol);

struct TraceCommutation {
  Complex lhs;      // tau(x y)
  Complex rhs;      // tau(y x)
  double residual;  // |lhs - rhs|
};

// tau(xy) versus tau(yx) for x in L^p, y in L^q with 1/p + 1/q = 1. The
// exponents are recorded for the report; finite dimension makes every element
// integrable.
TraceCommutation trace_commutation_check(const Element& x, const Element& y, double p, double q);

struct QuasiPair {
  QuasiFamily family;
  double generic;
  double closed;
};

// Everything for one (phi, omega, k) triple; sentinels ride along as +/-inf.
struct EntropyReport {
  double segal_omega = 0;
  double araki = 0;
  double umegaki = 0;
  std::vector<std::pair<double, double>> renyi;  // (alpha, value)
  std::vector<QuasiPair> quasi;
  bool support_dominance = false;
};

EntropyReport make_entropy_report(const State& phi, const State& omega,
                                  const std::optional<Element>& k,
                                  const std::vector<double>& renyi_alphas,
                                  const std::vector<QuasiFamily>& families,
                                  double group_tol = kGroupTol);

}  // namespace relmod
