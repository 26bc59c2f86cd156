#include "relmod/report.hpp"

#include <cmath>
#include <ctime>

#include "relmod/modular.hpp"

namespace relmod {

namespace {

using nlohmann::json;

// Residual between two routes that may both legitimately diverge: equal
// infinities count as exact agreement.
double route_residual(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) {
    if (std::isinf(a) && std::isinf(b) && std::signbit(a) == std::signbit(b)) return 0.0;
    return kInf;
  }
  return std::abs(a - b);
}

bool within(double residual, double reference, double tol) {
  return residual <= tol * std::max(1.0, std::abs(reference));
}

struct SentinelTracker {
  bool seen = false;
  json track(double v) {
    if (std::isinf(v)) seen = true;
    return json_number(v);
  }
};

json run_entropy_task(const ProblemFile& p, const TaskSpec& t, const RunOptions& opt,
                      SentinelTracker& sentinels) {
  State phi(p.matrices.at(t.phi), opt.support_eta);
  State omega(p.matrices.at(t.omega), opt.support_eta);

  json r;
  r["task"] = t.index;
  r["type"] = "entropy";
  r["phi"] = t.phi;
  r["omega"] = t.omega;
  r["support_dominance"] = support_dominated(omega, phi);
  r["segal_phi"] = sentinels.track(segal_entropy(phi));
  r["segal_omega"] = sentinels.track(segal_entropy(omega));

  const double araki = araki_relative_entropy(phi, omega, opt.group_tol);
  const double umegaki = umegaki_information(omega, phi);
  const double residual = route_residual(araki, umegaki);
  r["araki"] = sentinels.track(araki);
  r["umegaki"] = sentinels.track(umegaki);
  r["residual"] = sentinels.track(residual);
  r["agrees"] = within(residual, araki, opt.tol);
  return r;
}

json run_quasi_task(const ProblemFile& p, const TaskSpec& t, const RunOptions& opt,
                    SentinelTracker& sentinels) {
  State phi(p.matrices.at(t.phi), opt.support_eta);
  State omega(p.matrices.at(t.omega), opt.support_eta);
  const Element k = t.k ? p.matrices.at(*t.k) : Element::identity(p.shape);
  const QuasiFamily& family = *t.family;

  json r;
  r["task"] = t.index;
  r["type"] = "quasi";
  r["phi"] = t.phi;
  r["omega"] = t.omega;
  r["k"] = t.k ? *t.k : "identity";
  r["family"] = family_name(family);
  if (const auto* f = std::get_if<PowerFamily>(&family)) r["alpha"] = f->alpha;
  if (const auto* f = std::get_if<AffineFamily>(&family)) {
    r["a"] = f->a;
    r["b"] = f->b;
  }
  if (const auto* f = std::get_if<SkewFamily>(&family)) r["p"] = f->p;
  r["support_dominance"] = support_dominated(omega, phi);

  const double generic = quasi_entropy_generic(family, k, phi, omega, opt.group_tol);
  const double closed = quasi_entropy_closed(family, k, phi, omega);
  const double residual = route_residual(generic, closed);
  r["generic"] = sentinels.track(generic);
  r["closed"] = sentinels.track(closed);
  r["residual"] = sentinels.track(residual);
  r["agrees"] = within(residual, generic, opt.tol);
  return r;
}

json run_renyi_task(const ProblemFile& p, const TaskSpec& t, const RunOptions& opt,
                    SentinelTracker& sentinels) {
  State phi(p.matrices.at(t.phi), opt.support_eta);
  State omega(p.matrices.at(t.omega), opt.support_eta);

  json r;
  r["task"] = t.index;
  r["type"] = "renyi";
  r["phi"] = t.phi;
  r["omega"] = t.omega;
  r["support_dominance"] = support_dominated(omega, phi);
  json values = json::array();
  for (double alpha : t.alphas) {
    const double closed = renyi_relative_entropy(omega, phi, alpha);
    const double spectral = renyi_relative_entropy_spectral(omega, phi, alpha, opt.group_tol);
    const double residual = route_residual(closed, spectral);
    json v;
    v["alpha"] = alpha;
    v["closed"] = sentinels.track(closed);
    v["spectral"] = sentinels.track(spectral);
    v["residual"] = sentinels.track(residual);
    v["agrees"] = within(residual, closed, opt.tol);
    values.push_back(std::move(v));
  }
  r["values"] = std::move(values);
  return r;
}

}  // namespace

nlohmann::json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunOutcome run_report(const ProblemFile& problem, TaskSpec::Kind kind,
                      const RunOptions& options) {
  SentinelTracker sentinels;
  json results = json::array();
  for (const TaskSpec& t : problem.tasks) {
    if (t.kind != kind) continue;
    try {
      switch (kind) {
        case TaskSpec::Kind::Entropy:
          results.push_back(run_entropy_task(problem, t, options, sentinels));
          break;
        case TaskSpec::Kind::Quasi:
          results.push_back(run_quasi_task(problem, t, options, sentinels));
          break;
        case TaskSpec::Kind::Renyi:
          results.push_back(run_renyi_task(problem, t, options, sentinels));
          break;
        default:
          break;
      }
    } catch (const ProblemError&) {
      throw;
    } catch (const std::exception& e) {
      throw ProblemError(std::string("task ") + std::to_string(t.index) + " (" +
                         task_kind_name(t.kind) + "): " + e.what());
    }
  }
  if (results.empty())
    throw ProblemError(std::string("no ") + task_kind_name(kind) + " task in the problem file");

  RunOutcome out;
  out.sentinel = sentinels.seen;
  out.report["command"] = task_kind_name(kind);
  out.report["algebra"] = problem.shape.to_string();
  out.report["tol"] = options.tol;
  out.report["group_tol"] = options.group_tol;
  out.report["support_eta"] = options.support_eta;
  out.report["results"] = std::move(results);
  out.report["sentinel"] = out.sentinel;
  if (options.with_timestamp) out.report["timestamp"] = utc_timestamp();
  return out;
}

}  // namespace relmod
