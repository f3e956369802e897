#include "logds/problem_io.hpp"

#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "logds/expr.hpp"

namespace logds {

using json = nlohmann::json;

namespace {

double bound_side(const json& j, const std::string& path, bool lower) {
  if (j.is_null()) return lower ? -kInf : kInf;
  if (!j.is_number()) throw LoadError(path + ": bound side must be a number or null");
  return j.get<double>();
}

Evaluator compile(const std::string& src, int n, const std::string& path) {
  ExprPtr ast;
  try {
    ast = parse_expr(src);
  } catch (const ExprError& e) {
    throw LoadError(path + ": " + e.what());
  }
  int max_idx = max_var_index(*ast);
  if (max_idx > n)
    throw LoadError(path + ": references x" + std::to_string(max_idx) +
                    " but the problem dimension is " + std::to_string(n));
  std::shared_ptr<ExprNode> shared(ast.release());
  return [shared](const Vector& x) { return eval_expr(*shared, x); };
}

const json& require(const json& j, const std::string& key, const std::string& origin) {
  auto it = j.find(key);
  if (it == j.end()) throw LoadError(origin + ": missing required field '" + key + "'");
  return *it;
}

}  // namespace

LoadedProblem load_problem_json(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LoadError(origin + ": " + e.what());
  }
  if (!doc.is_object()) throw LoadError(origin + ": top-level value must be an object");

  std::string name = doc.value("name", origin);

  const json& jn = require(doc, "n", origin);
  if (!jn.is_number_integer() || jn.get<int>() < 1)
    throw LoadError(origin + ": n: must be a positive integer");
  const int n = jn.get<int>();

  const json& jobj = require(doc, "objective", origin);
  if (!jobj.is_string()) throw LoadError(origin + ": objective: must be an expression string");
  Evaluator objective = compile(jobj.get<std::string>(), n, origin + ": objective");

  std::vector<Evaluator> ineq;
  if (doc.contains("ineq")) {
    const json& arr = doc["ineq"];
    if (!arr.is_array()) throw LoadError(origin + ": ineq: must be an array of strings");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string())
        throw LoadError(origin + ": ineq[" + std::to_string(i) + "]: must be a string");
      ineq.push_back(compile(arr[i].get<std::string>(), n,
                             origin + ": ineq[" + std::to_string(i) + "]"));
    }
  }
  std::vector<Evaluator> eq;
  if (doc.contains("eq")) {
    const json& arr = doc["eq"];
    if (!arr.is_array()) throw LoadError(origin + ": eq: must be an array of strings");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string())
        throw LoadError(origin + ": eq[" + std::to_string(i) + "]: must be a string");
      eq.push_back(compile(arr[i].get<std::string>(), n,
                           origin + ": eq[" + std::to_string(i) + "]"));
    }
  }

  Bounds bounds = Bounds::unbounded(n);
  if (doc.contains("bounds")) {
    const json& arr = doc["bounds"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
      throw LoadError(origin + ": bounds: must be an array of n [lo, hi] pairs");
    for (int i = 0; i < n; ++i) {
      const json& pair = arr[i];
      std::string path = origin + ": bounds[" + std::to_string(i) + "]";
      if (!pair.is_array() || pair.size() != 2)
        throw LoadError(path + ": must be a [lo, hi] pair");
      bounds.lo[i] = bound_side(pair[0], path, true);
      bounds.hi[i] = bound_side(pair[1], path, false);
      if (!(bounds.lo[i] <= bounds.hi[i])) throw LoadError(path + ": lo > hi");
    }
  }

  std::optional<LinearConstraints> linear;
  if (doc.contains("linear") && !doc["linear"].is_null()) {
    const json& jl = doc["linear"];
    if (!jl.is_object()) throw LoadError(origin + ": linear: must be an object {A, b}");
    const json& jA = require(jl, "A", origin + ": linear");
    const json& jb = require(jl, "b", origin + ": linear");
    if (!jA.is_array() || !jb.is_array() || jA.size() != jb.size())
      throw LoadError(origin + ": linear: A and b must be arrays of matching length");
    const int q = static_cast<int>(jA.size());
    LinearConstraints lc;
    lc.A.resize(q, n);
    lc.b.resize(q);
    for (int r = 0; r < q; ++r) {
      const json& row = jA[r];
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw LoadError(origin + ": linear: A[" + std::to_string(r) + "]: must have length n");
      for (int c = 0; c < n; ++c) lc.A(r, c) = row[c].get<double>();
      lc.b[r] = jb[r].get<double>();
    }
    linear = std::move(lc);
  }

  const json& jx0 = require(doc, "x0", origin);
  if (!jx0.is_array() || static_cast<int>(jx0.size()) != n)
    throw LoadError(origin + ": x0: must be an array of length n");
  Vector x0(n);
  for (int i = 0; i < n; ++i) x0[i] = jx0[i].get<double>();

  KnownOptimum opt;
  if (doc.contains("known_f_star") && !doc["known_f_star"].is_null())
    opt.f_star = doc["known_f_star"].get<double>();
  if (doc.contains("known_x_star") && !doc["known_x_star"].is_null()) {
    const json& jxs = doc["known_x_star"];
    if (!jxs.is_array() || static_cast<int>(jxs.size()) != n)
      throw LoadError(origin + ": known_x_star: must be an array of length n");
    Vector xs(n);
    for (int i = 0; i < n; ++i) xs[i] = jxs[i].get<double>();
    opt.x_star = std::move(xs);
  }

  try {
    Problem problem(std::move(name), n, std::move(objective), std::move(ineq), std::move(eq),
                    std::move(linear), std::move(bounds), std::move(x0));
    return LoadedProblem{std::move(problem), std::move(opt)};
  } catch (const std::invalid_argument& e) {
    throw LoadError(origin + ": " + e.what());
  }
}

LoadedProblem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path + ": cannot open problem file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_problem_json(buf.str(), path);
}

}  // namespace logds
