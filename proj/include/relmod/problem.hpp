#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "relmod/algebra.hpp"
#include "relmod/entropy.hpp"

namespace relmod {

// Parse or validation failure with the offending location already formatted in.
class ProblemError : public std::runtime_error {
 public:
  explicit ProblemError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TaskSpec {
  enum class Kind { Entropy, Quasi, Renyi, Verify, Bench };

  Kind kind = Kind::Entropy;
  int index = 0;  // position in the file's task list

  // entropy / quasi / renyi
  std::string phi;
  std::string omega;
  std::optional<std::string> k;      // quasi; identity when omitted
  std::optional<QuasiFamily> family; // quasi
  std::vector<double> alphas;        // renyi grid

  // verify / bench descriptors (validated, executed via the flag-driven
  // subcommands)
  std::uint64_t seed = 42;
  std::string dims_spec;
  std::vector<AlgebraShape> dims;
  int trials = 25;
  int reps = 5;
};

struct ProblemFile {
  int version = 1;
  AlgebraShape shape;
  std::map<std::string, Element> matrices;  // canonical (sorted) order
  std::vector<TaskSpec> tasks;
};

struct ParseOptions {
  double support_eta = kSupportEta;
  double psd_tol = kPsdTol;
};

// Parse and validate eagerly: shape conformance of every matrix, positivity of
// every density referenced by a task, known task kinds. Syntax errors carry
// line/column positions, semantic errors carry JSON paths.
ProblemFile parse_problem(const std::string& path, const ParseOptions& opts = {});
ProblemFile parse_problem_text(const std::string& text, const std::string& origin,
                               const ParseOptions& opts = {});

// Canonical serialization; parse(serialize(parse(f))) is bit-identical on
// matrix entries.
nlohmann::json serialize_problem(const ProblemFile& p);

const char* task_kind_name(TaskSpec::Kind kind);

// "2;3;2,2" or "2,2:1,0.5": semicolon-separated shapes, comma-separated block
// dims, optional ":" weight list; missing weights cycle through {1, 0.5, 2, 0.25}.
std::vector<AlgebraShape> parse_dims_spec(const std::string& spec);

}  // namespace relmod
