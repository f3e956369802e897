#include "logds/problem_io.hpp"

#include <array>

namespace logds {

namespace {

// Analytic test problems with optima verified by hand (KKT / Lagrange
// conditions) and re-checked by the test-suite oracles before use.
struct BuiltinDef {
  const char* name;
  const char* json;
};

constexpr std::array<BuiltinDef, 6> kBuiltins = {{
    // Single nonlinear inequality, strictly interior start; optimum on the
    // constraint boundary at (2,3) with multiplier 1/2.
    {"hs12-like",
     R"({
       "name": "hs12-like",
       "n": 2,
       "objective": "0.5*x1^2 + x2^2 - x1*x2 - 7*x1 - 7*x2",
       "ineq": ["4*x1^2 + x2^2 - 25"],
       "x0": [0, 0],
       "known_f_star": -30.0,
       "known_x_star": [2, 3]
     })"},
    // Linear row plus bounds; the optimum sits on the lower bound x1 = 2.
    {"hs21-like",
     R"({
       "name": "hs21-like",
       "n": 2,
       "objective": "0.01*x1^2 + x2^2 - 100",
       "linear": {"A": [[-10, 1]], "b": [-10]},
       "bounds": [[2, 50], [-50, 50]],
       "x0": [5, 1],
       "known_f_star": -99.96,
       "known_x_star": [2, 0]
     })"},
    // Equality constraint, infeasible start at the origin.
    {"circle-eq",
     R"({
       "name": "circle-eq",
       "n": 2,
       "objective": "x1 + x2",
       "eq": ["x1^2 + x2^2 - 1"],
       "x0": [0, 0],
       "known_f_star": -1.4142135623730951,
       "known_x_star": [-0.7071067811865476, -0.7071067811865476]
     })"},
    // Mixed split: the disc is strictly satisfied at x0 (log group) while
    // -x1 <= 0 holds with equality (exterior group). Optimum at (1,0).
    {"disc-mixed",
     R"({
       "name": "disc-mixed",
       "n": 2,
       "objective": "(x1-2)^2 + x2^2",
       "ineq": ["x1^2 + x2^2 - 1", "-x1"],
       "x0": [0, 0],
       "known_f_star": 1.0,
       "known_x_star": [1, 0]
     })"},
    // Box only; the optimum activates the lower bound x1 = 0.
    {"box-quad",
     R"({
       "name": "box-quad",
       "n": 2,
       "objective": "(x1+1)^2 + (x2-0.5)^2",
       "bounds": [[0, 1], [0, 1]],
       "x0": [0.5, 0.5],
       "known_f_star": 1.0,
       "known_x_star": [0, 0.5]
     })"},
    // Three variables; both the inequality and the bound x1 >= 1 are active
    // at the optimum (1,0,0).
    {"hs30-like",
     R"({
       "name": "hs30-like",
       "n": 3,
       "objective": "x1^2 + x2^2 + x3^2",
       "ineq": ["1 - x1^2 - x2^2"],
       "bounds": [[1, 10], [-10, 10], [-10, 10]],
       "x0": [1.5, 1, 0.5],
       "known_f_star": 1.0,
       "known_x_star": [1, 0, 0]
     })"},
}};

}  // namespace

LoadedProblem builtin_problem(const std::string& name) {
  for (const BuiltinDef& def : kBuiltins)
    if (name == def.name) return load_problem_json(def.json, def.name);
  throw LoadError("unknown builtin problem '" + name + "'");
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  names.reserve(kBuiltins.size());
  for (const BuiltinDef& def : kBuiltins) names.emplace_back(def.name);
  return names;
}

std::vector<LoadedProblem> builtin_suite() {
  std::vector<LoadedProblem> suite;
  suite.reserve(kBuiltins.size());
  for (const BuiltinDef& def : kBuiltins) suite.push_back(load_problem_json(def.json, def.name));
  return suite;
}

}  // namespace logds
