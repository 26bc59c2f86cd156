#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relmod/bench.hpp"
#include "relmod/problem.hpp"
#include "relmod/report.hpp"
#include "relmod/verify.hpp"

namespace {

struct GlobalFlags {
  bool strict = false;
  bool no_timestamp = false;
  double tol = 1e-8;
  double group_tol = relmod::kGroupTol;
  double support_eta = relmod::kSupportEta;
};

void emit(const nlohmann::json& report) { std::cout << report.dump(2) << "\n"; }

int run_file_command(const std::string& path, relmod::TaskSpec::Kind kind,
                     const GlobalFlags& flags) {
  relmod::ParseOptions popts;
  popts.support_eta = flags.support_eta;
  relmod::ProblemFile problem = relmod::parse_problem(path, popts);

  relmod::RunOptions ropts;
  ropts.strict = flags.strict;
  ropts.with_timestamp = !flags.no_timestamp;
  ropts.tol = flags.tol;
  ropts.group_tol = flags.group_tol;
  ropts.support_eta = flags.support_eta;
  relmod::RunOutcome outcome = relmod::run_report(problem, kind, ropts);
  emit(outcome.report);
  return (outcome.sentinel && flags.strict) ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relative modular operator toolkit"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_flag("--strict", flags.strict,
               "exit with status 2 when any divergence sentinel appears");
  app.add_flag("--no-timestamp", flags.no_timestamp, "omit the timestamp field from reports");
  app.add_option("--tol", flags.tol, "route-agreement tolerance (default 1e-8)");
  app.add_option("--group-tol", flags.group_tol,
                 "eigenvalue grouping tolerance (default 1e-10)");
  app.add_option("--support-eta", flags.support_eta,
                 "kernel threshold for support projections (default 1e-12)");

  std::string entropy_file, quasi_file, renyi_file;
  CLI::App* entropy = app.add_subcommand("entropy", "relative entropy report for a problem file");
  entropy->add_option("file", entropy_file, "problem file")->required();
  CLI::App* quasi = app.add_subcommand("quasi", "quasi-entropy report for a problem file");
  quasi->add_option("file", quasi_file, "problem file")->required();
  CLI::App* renyi = app.add_subcommand("renyi", "Renyi divergence report for a problem file");
  renyi->add_option("file", renyi_file, "problem file")->required();

  std::uint64_t verify_seed = 42;
  std::string verify_dims;
  int verify_trials = 25;
  CLI::App* verify = app.add_subcommand("verify", "run the seeded invariant suite");
  verify->add_option("--seed", verify_seed, "random seed (default 42)");
  verify->add_option("--dims", verify_dims,
                     "shapes, e.g. \"2;3;2,2:1,0.5\" (default desk shapes)");
  verify->add_option("--trials", verify_trials, "trials per invariant family (default 25)");

  std::string bench_dims;
  int bench_reps = 5;
  std::uint64_t bench_seed = 42;
  CLI::App* bench = app.add_subcommand("bench", "time pairing vs dense spectral routes");
  bench->add_option("--dims", bench_dims, "shapes, e.g. \"4;8\"")->required();
  bench->add_option("--reps", bench_reps, "repetitions per timing (default 5)");
  bench->add_option("--seed", bench_seed, "random seed (default 42)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (entropy->parsed())
      return run_file_command(entropy_file, relmod::TaskSpec::Kind::Entropy, flags);
    if (quasi->parsed()) return run_file_command(quasi_file, relmod::TaskSpec::Kind::Quasi, flags);
    if (renyi->parsed()) return run_file_command(renyi_file, relmod::TaskSpec::Kind::Renyi, flags);

    if (verify->parsed()) {
      relmod::VerifyOptions vopts;
      vopts.seed = verify_seed;
      vopts.trials = verify_trials;
      if (!verify_dims.empty()) vopts.shapes = relmod::parse_dims_spec(verify_dims);
      std::vector<relmod::CheckResult> results = relmod::run_verify(vopts);
      emit(relmod::verify_report(results, vopts, !flags.no_timestamp));
      return relmod::total_failures(results) == 0 ? 0 : 1;
    }

    if (bench->parsed()) {
      relmod::BenchOptions bopts;
      bopts.seed = bench_seed;
      bopts.reps = bench_reps;
      bopts.shapes = relmod::parse_dims_spec(bench_dims);
      std::vector<relmod::BenchRow> rows = relmod::run_bench(bopts);
      emit(relmod::bench_report(rows, bopts, !flags.no_timestamp));
      for (const relmod::BenchRow& r : rows)
        if (!r.valid) return 1;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
