#include "relmod/problem.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>

namespace relmod {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& msg) {
  throw ProblemError(origin + ": " + path + ": " + msg);
}

// Byte offset -> 1-based line:column, for parser diagnostics.
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  const std::size_t stop = std::min(byte, text.size());
  for (std::size_t i = 0; i + 1 < stop + 1 && i < stop; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const json& expect(const json& obj, const std::string& key, const std::string& origin,
                   const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(origin, path, "missing required field \"" + key + "\"");
  return *it;
}

double as_double(const json& v, const std::string& origin, const std::string& path) {
  if (!v.is_number()) fail(origin, path, "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) fail(origin, path, "value is not finite");
  return d;
}

int as_int(const json& v, const std::string& origin, const std::string& path) {
  if (!v.is_number_integer()) fail(origin, path, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& origin, const std::string& path) {
  if (!v.is_string()) fail(origin, path, "expected a string");
  return v.get<std::string>();
}

AlgebraShape parse_shape(const json& alg, const std::string& origin) {
  if (!alg.is_object()) fail(origin, "/algebra", "expected an object");
  const json& jd = expect(alg, "dims", origin, "/algebra");
  const json& jw = expect(alg, "weights", origin, "/algebra");
  if (!jd.is_array() || jd.empty()) fail(origin, "/algebra/dims", "expected a nonempty array");
  if (!jw.is_array()) fail(origin, "/algebra/weights", "expected an array");
  std::vector<int> dims;
  for (std::size_t i = 0; i < jd.size(); ++i) {
    int n = as_int(jd[i], origin, "/algebra/dims/" + std::to_string(i));
    if (n < 1) fail(origin, "/algebra/dims/" + std::to_string(i), "block dimension must be >= 1");
    dims.push_back(n);
  }
  if (jw.size() != jd.size())
    fail(origin, "/algebra/weights", "expected " + std::to_string(jd.size()) +
                                         " weights, got " + std::to_string(jw.size()));
  std::vector<double> weights;
  for (std::size_t i = 0; i < jw.size(); ++i) {
    double w = as_double(jw[i], origin, "/algebra/weights/" + std::to_string(i));
    if (w <= 0.0)
      fail(origin, "/algebra/weights/" + std::to_string(i),
           "trace weight must be > 0 (the trace is faithful)");
    weights.push_back(w);
  }
  return AlgebraShape(dims, weights);
}

Element parse_matrix(const json& jm, const AlgebraShape& shape, const std::string& name,
                     const std::string& origin) {
  const std::string base = "/matrices/" + name;
  if (!jm.is_array() || jm.size() != static_cast<std::size_t>(shape.blocks()))
    fail(origin, base,
         "expected " + std::to_string(shape.blocks()) + " blocks for shape " + shape.to_string());
  std::vector<Matrix> blocks;
  for (int k = 0; k < shape.blocks(); ++k) {
    const json& jb = jm[static_cast<std::size_t>(k)];
    const int n = shape.dim(k);
    const std::string bpath = base + "/" + std::to_string(k);
    if (!jb.is_array() || jb.size() != static_cast<std::size_t>(n))
      fail(origin, bpath, "expected " + std::to_string(n) + " rows");
    Matrix m(n, n);
    for (int p = 0; p < n; ++p) {
      const json& jr = jb[static_cast<std::size_t>(p)];
      const std::string rpath = bpath + "/" + std::to_string(p);
      if (!jr.is_array() || jr.size() != static_cast<std::size_t>(n))
        fail(origin, rpath, "expected " + std::to_string(n) + " entries");
      for (int q = 0; q < n; ++q) {
        const json& je = jr[static_cast<std::size_t>(q)];
        const std::string epath = rpath + "/" + std::to_string(q);
        if (!je.is_array() || je.size() != 2)
          fail(origin, epath, "expected a [re, im] pair");
        double re = as_double(je[0], origin, epath + "/0");
        double im = as_double(je[1], origin, epath + "/1");
        m(p, q) = Complex(re, im);
      }
    }
    blocks.push_back(std::move(m));
  }
  return Element(shape, std::move(blocks));
}

const Element& lookup(const ProblemFile& p, const std::string& name, const std::string& origin,
                      const std::string& path) {
  auto it = p.matrices.find(name);
  if (it == p.matrices.end()) fail(origin, path, "unknown matrix \"" + name + "\"");
  return it->second;
}

// Densities are validated at parse time so a bad file is rejected before any
// task runs.
void check_density(const ProblemFile& p, const std::string& name, const std::string& origin,
                   const std::string& path, const ParseOptions& opts) {
  const Element& h = lookup(p, name, origin, path);
  try {
    State probe(h, opts.support_eta, opts.psd_tol);
    (void)probe;
  } catch (const std::exception& e) {
    fail(origin, path, "matrix \"" + name + "\" is not a valid density: " + e.what());
  }
}

QuasiFamily parse_family(const json& jt, const std::string& origin, const std::string& path) {
  const std::string fam = as_string(expect(jt, "family", origin, path), origin, path + "/family");
  if (fam == "neg_log") return NegLog{};
  if (fam == "power") {
    PowerFamily f;
    f.alpha = as_double(expect(jt, "alpha", origin, path), origin, path + "/alpha");
    if (!(f.alpha > 0.0 && f.alpha <= 1.0))
      fail(origin, path + "/alpha", "power exponent must lie in (0, 1]");
    return f;
  }
  if (fam == "t_log_t") return TLogT{};
  if (fam == "affine") {
    AffineFamily f;
    f.a = as_double(expect(jt, "a", origin, path), origin, path + "/a");
    f.b = as_double(expect(jt, "b", origin, path), origin, path + "/b");
    return f;
  }
  if (fam == "skew") {
    SkewFamily f;
    f.p = as_double(expect(jt, "p", origin, path), origin, path + "/p");
    if (!(f.p > 0.0 && f.p < 1.0)) fail(origin, path + "/p", "skew exponent must lie in (0, 1)");
    return f;
  }
  fail(origin, path + "/family",
       "unknown family \"" + fam + "\" (known: neg_log, power, t_log_t, affine, skew)");
}

TaskSpec parse_task(const json& jt, int index, const ProblemFile& p, const std::string& origin,
                    const ParseOptions& opts) {
  const std::string path = "/tasks/" + std::to_string(index);
  if (!jt.is_object()) fail(origin, path, "expected an object");
  TaskSpec t;
  t.index = index;
  const std::string type = as_string(expect(jt, "type", origin, path), origin, path + "/type");

  auto state_pair = [&]() {
    t.phi = as_string(expect(jt, "phi", origin, path), origin, path + "/phi");
    t.omega = as_string(expect(jt, "omega", origin, path), origin, path + "/omega");
    check_density(p, t.phi, origin, path + "/phi", opts);
    check_density(p, t.omega, origin, path + "/omega", opts);
  };

  if (type == "entropy") {
    t.kind = TaskSpec::Kind::Entropy;
    state_pair();
  } else if (type == "quasi") {
    t.kind = TaskSpec::Kind::Quasi;
    state_pair();
    if (jt.contains("k")) {
      t.k = as_string(jt["k"], origin, path + "/k");
      lookup(p, *t.k, origin, path + "/k");
    }
    t.family = parse_family(jt, origin, path);
  } else if (type == "renyi") {
    t.kind = TaskSpec::Kind::Renyi;
    state_pair();
    if (jt.contains("alphas")) {
      const json& ja = jt["alphas"];
      if (!ja.is_array() || ja.empty())
        fail(origin, path + "/alphas", "expected a nonempty array");
      for (std::size_t i = 0; i < ja.size(); ++i) {
        double a = as_double(ja[i], origin, path + "/alphas/" + std::to_string(i));
        if (a < 0.0 || a == 1.0)
          fail(origin, path + "/alphas/" + std::to_string(i),
               "order must be >= 0 and != 1");
        t.alphas.push_back(a);
      }
    } else {
      t.alphas = {0.0, 0.25, 0.5, 0.75, 0.9};
    }
  } else if (type == "verify" || type == "bench") {
    t.kind = (type == "verify") ? TaskSpec::Kind::Verify : TaskSpec::Kind::Bench;
    t.dims_spec = as_string(expect(jt, "dims", origin, path), origin, path + "/dims");
    try {
      t.dims = parse_dims_spec(t.dims_spec);
    } catch (const std::exception& e) {
      fail(origin, path + "/dims", e.what());
    }
    if (jt.contains("seed")) {
      if (!jt["seed"].is_number_unsigned()) fail(origin, path + "/seed", "expected an unsigned integer");
      t.seed = jt["seed"].get<std::uint64_t>();
    }
    if (type == "verify") {
      if (jt.contains("trials")) {
        t.trials = as_int(jt["trials"], origin, path + "/trials");
        if (t.trials < 0) fail(origin, path + "/trials", "trial count must be >= 0");
      }
    } else if (jt.contains("reps")) {
      t.reps = as_int(jt["reps"], origin, path + "/reps");
      if (t.reps < 1) fail(origin, path + "/reps", "repetition count must be >= 1");
    }
  } else {
    fail(origin, path + "/type",
         "unknown task type \"" + type + "\" (known: entropy, quasi, renyi, verify, bench)");
  }
  return t;
}

json serialize_matrix(const Element& x) {
  json blocks = json::array();
  for (int k = 0; k < x.shape().blocks(); ++k) {
    const Matrix& m = x.block(k);
    json rows = json::array();
    for (int p = 0; p < m.rows(); ++p) {
      json row = json::array();
      for (int q = 0; q < m.cols(); ++q)
        row.push_back(json::array({m(p, q).real(), m(p, q).imag()}));
      rows.push_back(std::move(row));
    }
    blocks.push_back(std::move(rows));
  }
  return blocks;
}

}  // namespace

ProblemFile parse_problem_text(const std::string& text, const std::string& origin,
                               const ParseOptions& opts) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ProblemError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                       ": " + e.what());
  } catch (const json::exception& e) {
    // e.g. numeric overflow: representable syntax, unrepresentable value
    throw ProblemError(origin + ": " + e.what());
  }
  if (!doc.is_object()) fail(origin, "/", "expected a top-level object");

  const json& jver = expect(doc, "version", origin, "/");
  if (!jver.is_number_integer() || jver.get<int>() != 1)
    fail(origin, "/version", "unsupported schema version (expected 1)");

  ProblemFile p;
  p.version = 1;
  p.shape = parse_shape(expect(doc, "algebra", origin, "/"), origin);

  const json& jm = expect(doc, "matrices", origin, "/");
  if (!jm.is_object()) fail(origin, "/matrices", "expected an object");
  for (auto it = jm.begin(); it != jm.end(); ++it)
    p.matrices.emplace(it.key(), parse_matrix(it.value(), p.shape, it.key(), origin));

  const json& jt = expect(doc, "tasks", origin, "/");
  if (!jt.is_array()) fail(origin, "/tasks", "expected an array");
  for (std::size_t i = 0; i < jt.size(); ++i)
    p.tasks.push_back(parse_task(jt[i], static_cast<int>(i), p, origin, opts));

  return p;
}

ProblemFile parse_problem(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProblemError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str(), path, opts);
}

nlohmann::json serialize_problem(const ProblemFile& p) {
  json doc;
  doc["version"] = p.version;
  doc["algebra"]["dims"] = json::array();
  doc["algebra"]["weights"] = json::array();
  for (int k = 0; k < p.shape.blocks(); ++k) {
    doc["algebra"]["dims"].push_back(p.shape.dim(k));
    doc["algebra"]["weights"].push_back(p.shape.weight(k));
  }
  doc["matrices"] = json::object();
  for (const auto& [name, x] : p.matrices) doc["matrices"][name] = serialize_matrix(x);
  doc["tasks"] = json::array();
  for (const TaskSpec& t : p.tasks) {
    json jt;
    jt["type"] = task_kind_name(t.kind);
    switch (t.kind) {
      case TaskSpec::Kind::Entropy:
        jt["phi"] = t.phi;
        jt["omega"] = t.omega;
        break;
      case TaskSpec::Kind::Quasi: {
        jt["phi"] = t.phi;
        jt["omega"] = t.omega;
        if (t.k) jt["k"] = *t.k;
        jt["family"] = family_name(*t.family);
        if (const auto* f = std::get_if<PowerFamily>(&*t.family)) jt["alpha"] = f->alpha;
        if (const auto* f = std::get_if<AffineFamily>(&*t.family)) {
          jt["a"] = f->a;
          jt["b"] = f->b;
        }
        if (const auto* f = std::get_if<SkewFamily>(&*t.family)) jt["p"] = f->p;
        break;
      }
      case TaskSpec::Kind::Renyi:
        jt["phi"] = t.phi;
        jt["omega"] = t.omega;
        jt["alphas"] = t.alphas;
        break;
      case TaskSpec::Kind::Verify:
        jt["dims"] = t.dims_spec;
        jt["seed"] = t.seed;
        jt["trials"] = t.trials;
        break;
      case TaskSpec::Kind::Bench:
        jt["dims"] = t.dims_spec;
        jt["seed"] = t.seed;
        jt["reps"] = t.reps;
        break;
    }
    doc["tasks"].push_back(std::move(jt));
  }
  return doc;
}

const char* task_kind_name(TaskSpec::Kind kind) {
  switch (kind) {
    case TaskSpec::Kind::Entropy: return "entropy";
    case TaskSpec::Kind::Quasi: return "quasi";
    case TaskSpec::Kind::Renyi: return "renyi";
    case TaskSpec::Kind::Verify: return "verify";
    case TaskSpec::Kind::Bench: return "bench";
  }
  return "?";
}

std::vector<AlgebraShape> parse_dims_spec(const std::string& spec) {
  static const double kWeightCycle[] = {1.0, 0.5, 2.0, 0.25};
  std::vector<AlgebraShape> shapes;
  std::istringstream shapes_in(spec);
  std::string token;
  while (std::getline(shapes_in, token, ';')) {
    if (token.empty()) continue;
    std::string dims_part = token;
    std::string weights_part;
    if (auto colon = token.find(':'); colon != std::string::npos) {
      dims_part = token.substr(0, colon);
      weights_part = token.substr(colon + 1);
    }
    std::vector<int> dims;
    std::istringstream dims_in(dims_part);
    std::string piece;
    while (std::getline(dims_in, piece, ',')) {
      std::size_t used = 0;
      int n = 0;
      try {
        n = std::stoi(piece, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != piece.size() || n < 1)
        throw ProblemError("bad dims spec \"" + spec + "\": block dimension \"" + piece +
                           "\" must be a positive integer");
      dims.push_back(n);
    }
    if (dims.empty())
      throw ProblemError("bad dims spec \"" + spec + "\": empty shape \"" + token + "\"");
    std::vector<double> weights;
    if (weights_part.empty()) {
      for (std::size_t i = 0; i < dims.size(); ++i) weights.push_back(kWeightCycle[i % 4]);
    } else {
      std::istringstream w_in(weights_part);
      while (std::getline(w_in, piece, ',')) {
        std::size_t used = 0;
        double w = 0;
        try {
          w = std::stod(piece, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != piece.size() || !(w > 0.0) || !std::isfinite(w))
          throw ProblemError("bad dims spec \"" + spec + "\": weight \"" + piece +
                             "\" must be a positive number");
        weights.push_back(w);
      }
      if (weights.size() != dims.size())
        throw ProblemError("bad dims spec \"" + spec + "\": " + std::to_string(dims.size()) +
                           " dims but " + std::to_string(weights.size()) + " weights");
    }
    shapes.emplace_back(dims, weights);
  }
  if (shapes.empty()) throw ProblemError("bad dims spec \"" + spec + "\": no shapes");
  return shapes;
}

}  // namespace relmod
