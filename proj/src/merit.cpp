#include "logds/merit.hpp"

#include <cmath>
#include <stdexcept>

namespace logds {

ConstraintPartition partition_constraints(const Problem& problem) {
  ConstraintPartition part;
  const Vector& x0 = problem.x0();
  for (int i = 0; i < problem.num_ineq(); ++i) {
    double gi = problem.ineq(i, x0);
    if (!std::isfinite(gi))
      throw std::runtime_error(problem.name() + ": inequality constraint " +
                               std::to_string(i + 1) + " is not finite at x0");
    if (gi < 0.0)
      part.log_set.push_back(i);
    else
      part.ext_set.push_back(i);
  }
  return part;
}

void MeritParams::validate() const {
  if (!(rho_log > 0.0)) throw std::invalid_argument("rho_log must be positive");
  if (!(rho_ext > 0.0)) throw std::invalid_argument("rho_ext must be positive");
  if (!(nu > 1.0 && nu <= 2.0)) throw std::invalid_argument("nu must lie in (1, 2]");
}

double violation(const Vector& g, const Vector& h) {
  double c = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (std::isnan(g[i])) return kInf;
    c += std::max(0.0, g[i]);
  }
  for (int j = 0; j < h.size(); ++j) {
    if (std::isnan(h[j])) return kInf;
    c += std::fabs(h[j]);
  }
  return c;
}

double merit_from_raw(double f, const Vector& g, const Vector& h,
                      const ConstraintPartition& part, const MeritParams& params) {
  if (!std::isfinite(f)) return kInf;
  for (int i = 0; i < g.size(); ++i)
    if (!std::isfinite(g[i])) return kInf;
  for (int j = 0; j < h.size(); ++j)
    if (!std::isfinite(h[j])) return kInf;

  double z = f;
  for (int l : part.log_set) {
    if (g[l] >= 0.0) return kInf;  // barrier
    z -= params.rho_log * std::log(-g[l]);
  }
  double pen = 0.0;
  for (int l : part.ext_set) pen += std::pow(std::max(0.0, g[l]), params.nu);
  for (int j = 0; j < h.size(); ++j) pen += std::pow(std::fabs(h[j]), params.nu);
  z += pen / params.rho_ext;
  return std::isfinite(z) ? z : kInf;
}

EvaluationRecord merit_eval(const Problem& problem, const ConstraintPartition& part,
                            const MeritParams& params, const Vector& x, int eval_index) {
  EvaluationRecord rec;
  rec.x = x;
  rec.eval_index = eval_index;
  rec.f = problem.objective(x);
  rec.g = problem.eval_ineq(x);
  rec.h = problem.eval_eq(x);

  rec.evaluator_failure = !std::isfinite(rec.f);
  for (int i = 0; i < rec.g.size() && !rec.evaluator_failure; ++i)
    rec.evaluator_failure = !std::isfinite(rec.g[i]);
  for (int j = 0; j < rec.h.size() && !rec.evaluator_failure; ++j)
    rec.evaluator_failure = !std::isfinite(rec.h[j]);

  rec.merit = merit_from_raw(rec.f, rec.g, rec.h, part, params);
  rec.violation = violation(rec.g, rec.h);
  return rec;
}

std::pair<Vector, Vector> multiplier_estimates(const Problem& problem,
                                               const ConstraintPartition& part,
                                               const MeritParams& params, const Vector& x) {
  params.validate();
  Vector g = problem.eval_ineq(x);
  Vector h = problem.eval_eq(x);
  Vector lambda = Vector::Zero(g.size());
  Vector mu = Vector::Zero(h.size());
  for (int l : part.log_set) {
    if (!(g[l] < 0.0))
      throw std::domain_error("multiplier_estimates: log-group constraint " +
                              std::to_string(l + 1) + " is not strictly satisfied");
    lambda[l] = params.rho_log / (-g[l]);
  }
  for (int l : part.ext_set)
    lambda[l] = params.nu * std::pow(std::max(g[l], 0.0), params.nu - 1.0) / params.rho_ext;
  for (int j = 0; j < h.size(); ++j)
    mu[j] = params.nu * std::pow(std::fabs(h[j]), params.nu - 1.0) / params.rho_ext;
  return {lambda, mu};
}

}  // namespace logds
