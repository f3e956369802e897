#pragma once

#include <utility>
#include <vector>

#include "logds/problem.hpp"

namespace logds {

/// Inequality split frozen at the starting point: indices with g(x0) < 0 are
/// handled by the log barrier, the rest (g(x0) >= 0) by the exterior penalty.
/// Indices are 0-based into the problem's inequality list.
struct ConstraintPartition {
  std::vector<int> log_set;
  std::vector<int> ext_set;
};

/// g(x0) < 0 -> log_set, g(x0) >= 0 -> ext_set (an exact zero goes exterior).
/// Throws std::runtime_error naming the constraint if g(x0) is not finite.
ConstraintPartition partition_constraints(const Problem& problem);

struct MeritParams {
  double rho_log;  // > 0, weight of the log-barrier group
  double rho_ext;  // > 0, reciprocal weight of the exterior penalty group
  double nu;       // in (1, 2], penalty exponent

  void validate() const;
};

/// One merit evaluation: the raw values, the merit value at the parameters in
/// force, and the constraint violation. Raw values are cached so surrogate
/// models can be rebuilt without spending further evaluations.
struct EvaluationRecord {
  Vector x;
  double f = 0.0;
  Vector g;
  Vector h;
  double merit = 0.0;
  double violation = 0.0;
  int eval_index = 0;
  bool evaluator_failure = false;  // NaN/inf came back from an evaluator
};

/// c(x) = sum_i max{0, g_i} + sum_j |h_j|. Infinite inputs propagate; any NaN
/// input yields +inf (NaN never reaches a comparison).
double violation(const Vector& g, const Vector& h);

/// Merit value from cached raw values:
///   Z = f - rho_log * sum_{log} log(-g_l)
///       + (1/rho_ext) * (sum_{ext} max{0,g_l}^nu + sum_j |h_j|^nu).
/// Returns +inf when any log-group constraint has g_l >= 0, or when any raw
/// value is non-finite.
double merit_from_raw(double f, const Vector& g, const Vector& h,
                      const ConstraintPartition& part, const MeritParams& params);

/// Evaluates f, g, h at x (one budget unit) and assembles the record.
/// Evaluator NaN/inf is flagged, never thrown.
EvaluationRecord merit_eval(const Problem& problem, const ConstraintPartition& part,
                            const MeritParams& params, const Vector& x, int eval_index = 0);

/// Lagrange multiplier approximations (diagnostics only):
///   log group:  lambda_l = rho_log / (-g_l)
///   ext group:  lambda_l = nu * max{g_l, 0}^(nu-1) / rho_ext
///   equalities: mu_j     = nu * |h_j|^(nu-1) / rho_ext
/// Requires g_l(x) < 0 on the log group; throws std::domain_error otherwise.
std::pair<Vector, Vector> multiplier_estimates(const Problem& problem,
                                               const ConstraintPartition& part,
                                               const MeritParams& params, const Vector& x);

}  // namespace logds
