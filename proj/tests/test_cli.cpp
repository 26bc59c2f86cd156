#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "helpers.hpp"
#include "relmod/bench.hpp"
#include "relmod/problem.hpp"
#include "relmod/report.hpp"
#include "relmod/verify.hpp"

using namespace relmod;
using nlohmann::json;

namespace {

std::string data_path(const std::string& name) {
  return testutil::env_or("RELMOD_DATA", "data") + "/" + name;
}

void expect_parse_error(const std::string& text, const std::string& needle) {
  try {
    parse_problem_text(text, "test.json");
    FAIL("expected a parse error containing: " << needle);
  } catch (const ProblemError& e) {
    std::string msg = e.what();
    INFO("message: " << msg);
    CHECK(msg.find(needle) != std::string::npos);
  }
}

// One 2x2 block problem with named diagonal densities; tasks appended raw.
std::string problem_with_tasks(const std::string& tasks) {
  return R"({
  "version": 1,
  "algebra": {"dims": [2], "weights": [1.0]},
  "matrices": {
    "rho": [[[[0.75, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.25, 0.0]]]],
    "tau": [[[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]]
  },
  "tasks": [)" + tasks +
         "]\n}\n";
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("problem files round-trip through the canonical serialization") {
  ProblemFile p = parse_problem(data_path("commuting.json"));
  CHECK(p.version == 1);
  CHECK(p.shape.blocks() == 1);
  REQUIRE(p.matrices.count("h_phi") == 1);
  REQUIRE(p.tasks.size() == 3);

  json first = serialize_problem(p);
  ProblemFile again = parse_problem_text(first.dump(2), "roundtrip.json");
  json second = serialize_problem(again);
  CHECK(first.dump(2) == second.dump(2));
  CHECK(testutil::elem_diff(p.matrices.at("h_phi"), again.matrices.at("h_phi")) == 0.0);
  CHECK(testutil::elem_diff(p.matrices.at("K"), again.matrices.at("K")) == 0.0);
}

TEST_CASE("parse errors carry locations and name the offender") {
  expect_parse_error(problem_with_tasks(
                         R"({"type": "entropy", "phi": "bad", "omega": "tau"})"),
                     "unknown matrix \"bad\"");

  // Negative density names the matrix and the task slot that referenced it.
  std::string negative = R"({
  "version": 1,
  "algebra": {"dims": [2], "weights": [1.0]},
  "matrices": {
    "rho": [[[[0.75, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.25, 0.0]]]],
    "tau": [[[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]]
  },
  "tasks": [{"type": "entropy", "phi": "rho", "omega": "tau"}]
})";
  expect_parse_error(negative, "matrix \"rho\" is not a valid density");
  expect_parse_error(negative, "/tasks/0/phi");

  std::string zero_weight = R"({"version": 1, "algebra": {"dims": [2], "weights": [0.0]},
                                "matrices": {}, "tasks": []})";
  expect_parse_error(zero_weight, "trace weight must be > 0 (the trace is faithful)");
  expect_parse_error(zero_weight, "/algebra/weights/0");

  expect_parse_error(R"({"version": 2, "algebra": {"dims": [1], "weights": [1]},
                         "matrices": {}, "tasks": []})",
                     "unsupported schema version (expected 1)");

  expect_parse_error(problem_with_tasks(R"({"type": "jigsaw"})"),
                     "unknown task type \"jigsaw\" (known: entropy, quasi, renyi, verify, bench)");

  // Syntax failure points at line and column of the bad byte.
  expect_parse_error("{\n  \"version\": 1,\n  !\n}", "test.json:3:3");

  // A matrix with the wrong block count cannot live on this shape.
  expect_parse_error(R"({"version": 1, "algebra": {"dims": [2, 2], "weights": [1, 1]},
                         "matrices": {"x": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]},
                         "tasks": []})",
                     "expected 2 blocks");

  // Entries must stay finite; an overflowing literal is refused at parse time.
  std::string nonfinite = problem_with_tasks("");
  nonfinite.replace(nonfinite.find("0.75"), 4, "1e999");
  expect_parse_error(nonfinite, "number overflow");
  expect_parse_error(nonfinite, "test.json");
}

TEST_CASE("entropy report for the commuting fixture") {
  ProblemFile p = parse_problem(data_path("commuting.json"));
  RunOptions opts;
  opts.with_timestamp = false;
  RunOutcome out = run_report(p, TaskSpec::Kind::Entropy, opts);

  CHECK_FALSE(out.sentinel);
  CHECK(out.report["command"] == "entropy");
  CHECK_FALSE(out.report.contains("timestamp"));
  const json& r = out.report["results"][0];
  CHECK(r["support_dominance"] == true);
  CHECK(r["agrees"] == true);
  CHECK(std::abs(r["araki"].get<double>() - 0.5 * std::log(4.0 / 3.0)) <= 1e-12);
  CHECK(r["residual"].get<double>() <= 1e-10);

  RunOutcome quasi = run_report(p, TaskSpec::Kind::Quasi, opts);
  const json& q = quasi.report["results"][0];
  CHECK(q["agrees"] == true);
  double overlap = std::sqrt(0.375) + std::sqrt(0.125);
  CHECK(std::abs(q["generic"].get<double>() - overlap) <= 1e-12);

  RunOutcome renyi = run_report(p, TaskSpec::Kind::Renyi, opts);
  const json& values = renyi.report["results"][0]["values"];
  REQUIRE(values.size() == 5);  // default grid 0, 1/4, 1/2, 3/4, 9/10
  for (const json& v : values) CHECK(v["agrees"] == true);
  CHECK(std::abs(values[2]["closed"].get<double>() - -2.0 * std::log(overlap)) <= 1e-12);
}

TEST_CASE("support violation surfaces as a sentinel, not an exception") {
  ProblemFile p = parse_problem(data_path("support_violation.json"));
  RunOptions opts;
  opts.with_timestamp = false;
  RunOutcome out = run_report(p, TaskSpec::Kind::Entropy, opts);

  CHECK(out.sentinel);
  const json& r = out.report["results"][0];
  CHECK(r["support_dominance"] == false);
  CHECK(r["araki"] == "+inf");
  CHECK(r["umegaki"] == "+inf");
}

TEST_CASE("identical states report zero for every relative quantity") {
  std::string text = problem_with_tasks(
      R"({"type": "entropy", "phi": "rho", "omega": "rho"},
         {"type": "renyi", "phi": "rho", "omega": "rho"})");
  ProblemFile p = parse_problem_text(text, "self.json");
  RunOptions opts;
  opts.with_timestamp = false;

  RunOutcome entropy = run_report(p, TaskSpec::Kind::Entropy, opts);
  const json& e = entropy.report["results"][0];
  CHECK(std::abs(e["araki"].get<double>()) <= 1e-10);
  CHECK(std::abs(e["umegaki"].get<double>()) <= 1e-10);

  RunOutcome renyi = run_report(p, TaskSpec::Kind::Renyi, opts);
  const json& values = renyi.report["results"][0]["values"];
  for (const json& v : values) CHECK(std::abs(v["closed"].get<double>()) <= 1e-10);
}

TEST_CASE("report demands a task of the requested kind") {
  ProblemFile p = parse_problem_text(problem_with_tasks(
                                         R"({"type": "entropy", "phi": "rho", "omega": "tau"})"),
                                     "only-entropy.json");
  RunOptions opts;
  CHECK_THROWS_AS(run_report(p, TaskSpec::Kind::Quasi, opts), ProblemError);
}

TEST_CASE("verification summary is deterministic and clean on small runs") {
  VerifyOptions opts;
  opts.trials = 2;
  std::vector<CheckResult> checks = run_verify(opts);
  REQUIRE(!checks.empty());
  CHECK(total_failures(checks) == 0);
  for (const CheckResult& c : checks) {
    CHECK(c.failures == 0);
    CHECK(c.trials > 0);
  }

  std::vector<CheckResult> again = run_verify(opts);
  json a = verify_report(checks, opts, false);
  json b = verify_report(again, opts, false);
  CHECK(a.dump(2) == b.dump(2));
  CHECK(a["status"] == "pass");

  opts.trials = 0;
  CHECK(run_verify(opts).empty());
}

TEST_CASE("bench rows validate routes against each other") {
  BenchOptions opts;
  opts.shapes = parse_dims_spec("4;2,2:1,0.5");
  opts.reps = 1;
  std::vector<BenchRow> rows = run_bench(opts);
  REQUIRE(rows.size() == 4);  // two shapes x two routes
  for (const BenchRow& r : rows) {
    CHECK(r.valid);
    CHECK(r.residual <= 1e-9);
    CHECK(r.note == "single sample, variance unknown");
    CHECK(r.median_ms >= 0.0);
  }

  BenchOptions bad;
  bad.shapes = parse_dims_spec("70");  // D = 4900 exceeds the dense cap
  CHECK_THROWS_AS(run_bench(bad), std::exception);
}

TEST_CASE("dims specs parse shapes, weights and defaults") {
  std::vector<AlgebraShape> shapes = parse_dims_spec("2,2:1,0.5;3");
  REQUIRE(shapes.size() == 2);
  CHECK(shapes[0].blocks() == 2);
  CHECK(shapes[0].weights()[1] == 0.5);
  CHECK(shapes[1].blocks() == 1);
  CHECK(shapes[1].weights()[0] == 1.0);  // cycle default

  // Missing weights cycle 1, 0.5, 2, 0.25 block by block.
  std::vector<AlgebraShape> cycled = parse_dims_spec("1,1,1,1,1");
  CHECK(cycled[0].weights() == std::vector<double>{1.0, 0.5, 2.0, 0.25, 1.0});

  CHECK_THROWS_AS(parse_dims_spec("0"), ProblemError);
  CHECK_THROWS_AS(parse_dims_spec("2:1,2"), ProblemError);
  CHECK_THROWS_AS(parse_dims_spec("2:-1"), ProblemError);
  CHECK_THROWS_AS(parse_dims_spec(""), ProblemError);
  CHECK_THROWS_AS(parse_dims_spec("x"), ProblemError);
}

TEST_CASE("binary end to end: reports, exit codes, deterministic reruns") {
  std::string bin = testutil::env_or("RELMOD_BIN", "");
  if (bin.empty()) {
    MESSAGE("RELMOD_BIN not set; skipping binary checks");
    return;
  }
  std::string data = testutil::env_or("RELMOD_DATA", "data");

  CommandResult entropy = run_command("'" + bin + "' entropy '" + data + "/commuting.json'");
  CHECK(entropy.exit_code == 0);
  json rep = json::parse(entropy.out);
  CHECK(rep["command"] == "entropy");
  CHECK(rep.contains("timestamp"));

  // Sentinel reports succeed by default and signal under --strict.
  std::string viol = "'" + bin + "' entropy '" + data + "/support_violation.json'";
  CHECK(run_command(viol).exit_code == 0);
  CommandResult strict = run_command("'" + bin + "' --strict entropy '" + data +
                                     "/support_violation.json'");
  CHECK(strict.exit_code == 2);
  CHECK(json::parse(strict.out)["sentinel"] == true);

  CommandResult missing = run_command("'" + bin + "' entropy /nonexistent.json 2>/dev/null");
  CHECK(missing.exit_code == 1);

  std::string verify_cmd = "'" + bin + "' --no-timestamp verify --trials 2 --seed 7";
  CommandResult v1 = run_command(verify_cmd);
  CommandResult v2 = run_command(verify_cmd);
  CHECK(v1.exit_code == 0);
  CHECK(v1.out == v2.out);
  CHECK(json::parse(v1.out)["failures_total"] == 0);

  CommandResult bench = run_command("'" + bin + "' --no-timestamp bench --dims 4 --reps 1");
  CHECK(bench.exit_code == 0);
  for (const json& row : json::parse(bench.out)["rows"]) CHECK(row["valid"] == true);
}
