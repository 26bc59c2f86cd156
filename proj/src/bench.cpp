#include "relmod/bench.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "relmod/random.hpp"
#include "relmod/report.hpp"

namespace relmod {

namespace {

constexpr double kResidualBound = 1e-9;

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

template <typename Fn>
double median_wall_ms(int reps, Fn&& fn) {
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return median(std::move(times));
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  if (options.shapes.empty()) throw std::invalid_argument("bench: no shapes given");
  if (options.reps < 1) throw std::invalid_argument("bench: reps must be >= 1");

  std::vector<BenchRow> rows;
  for (std::size_t si = 0; si < options.shapes.size(); ++si) {
    const AlgebraShape& shape = options.shapes[si];
    if (shape.gns_dim() > options.oracle_cap)
      throw std::runtime_error("bench: dense oracle dimension D=" +
                               std::to_string(shape.gns_dim()) + " for shape " +
                               shape.to_string() + " exceeds cap " +
                               std::to_string(options.oracle_cap));

    Rng rng(mix_seed(options.seed, 0x6265u * 1024 + si));
    State phi = random_state(shape, rng);
    State omega = random_state(shape, rng);

    std::vector<double> pairing_eigs;
    double pairing_ms = median_wall_ms(options.reps, [&] {
      RelativeModular delta = RelativeModular::build(phi, omega);
      pairing_eigs = delta.eigenvalues();
    });

    Eigen::VectorXd dense_eigs;
    double dense_ms = median_wall_ms(options.reps, [&] {
      RelativeModular delta = RelativeModular::build(phi, omega);
      Eigen::SelfAdjointEigenSolver<Matrix> es(delta.dense_matrix(options.oracle_cap));
      dense_eigs = es.eigenvalues();
    });

    double residual = 0.0;
    double top = 1.0;
    for (std::size_t i = 0; i < pairing_eigs.size(); ++i) {
      residual = std::max(residual, std::abs(pairing_eigs[i] -
                                             dense_eigs(static_cast<Eigen::Index>(i))));
      top = std::max(top, std::abs(pairing_eigs[i]));
    }
    residual /= top;
    const bool valid = residual <= kResidualBound;
    const std::string note = options.reps == 1 ? "single sample, variance unknown" : "";

    rows.push_back({shape.to_string(), "pairing", options.reps, pairing_ms, residual, valid, note});
    rows.push_back({shape.to_string(), "dense", options.reps, dense_ms, residual, valid, note});
  }
  return rows;
}

nlohmann::json bench_report(const std::vector<BenchRow>& rows, const BenchOptions& options,
                            bool with_timestamp) {
  nlohmann::json table = nlohmann::json::array();
  for (const BenchRow& r : rows) {
    nlohmann::json row;
    row["shape"] = r.shape;
    row["route"] = r.route;
    row["reps"] = r.reps;
    row["median_ms"] = r.median_ms;
    row["residual"] = json_number(r.residual);
    row["valid"] = r.valid;
    row["note"] = r.note;
    table.push_back(std::move(row));
  }
  nlohmann::json report;
  report["command"] = "bench";
  report["seed"] = options.seed;
  report["reps"] = options.reps;
  report["rows"] = std::move(table);
  if (with_timestamp) report["timestamp"] = utc_timestamp();
  return report;
}

}  // namespace relmod
