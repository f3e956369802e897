#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logds/problem.hpp"

namespace logds {

/// Problem-file or schema failure; messages carry the offending field path.
class LoadError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct KnownOptimum {
  std::optional<double> f_star;
  std::optional<Vector> x_star;
};

struct LoadedProblem {
  Problem problem;
  KnownOptimum optimum;
};

/// Parses a problem from JSON text. Field names: name, n, objective, ineq,
/// eq, bounds, linear {A, b}, x0, known_f_star, known_x_star. Expressions
/// follow the g <= 0 / h = 0 sign conventions; bound sides may be null for
/// +-inf. Throws LoadError with a field path on schema violations, parse
/// errors, or x0 outside the linear constraints/bounds.
LoadedProblem load_problem_json(const std::string& json_text,
                                const std::string& origin = "<string>");

/// Reads the file at `path` and delegates to load_problem_json.
LoadedProblem load_problem_file(const std::string& path);

/// Built-in analytic problem by name; throws LoadError for unknown names.
LoadedProblem builtin_problem(const std::string& name);

std::vector<std::string> builtin_names();

/// All built-in problems with their known optima.
std::vector<LoadedProblem> builtin_suite();

}  // namespace logds
