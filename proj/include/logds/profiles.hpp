#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "logds/merit.hpp"  // violation(g, h) is part of this module's surface

namespace logds {

/// One solver's evaluation stream on one problem.
struct HistoryEntry {
  int eval_index = 0;  // strictly increasing from 1
  double f = 0.0;
  double violation = 0.0;
};

struct RunHistory {
  std::string problem;
  std::string solver;
  int n = 0;  // problem dimension (needed by data profiles)
  std::vector<HistoryEntry> entries;
};

/// Evaluations-to-convergence matrix t[p][s] (+inf where the test was never
/// met), with per-problem dimensions.
struct ProfileTable {
  std::vector<std::string> problems;
  std::vector<std::string> solvers;
  std::vector<std::vector<double>> t;  // |P| x |S|
  std::vector<int> n_p;
  double tau = 0.0;
};

/// Smallest eval_index whose feasibility-filtered objective satisfies
///   f_M - f(x) >= (1 - tau) * (f_M - f_L),
/// where f is +inf at entries with c(x) > feas_tol. Returns +inf when the
/// test is never met. Requires finite f_M >= f_L.
double convergence_eval_count(const RunHistory& history, double f_M, double f_L, double tau,
                              double feas_tol = 1e-4);

/// Computes f_L / f_M per problem across all solvers' evaluated points and
/// fills t via convergence_eval_count. Problems with no feasible point for
/// any solver are dropped (a note is appended to `warnings` when given).
/// Duplicate (problem, solver) pairs throw std::invalid_argument.
ProfileTable build_table(const std::vector<RunHistory>& histories, double tau,
                         double feas_tol = 1e-4, std::vector<std::string>* warnings = nullptr);

/// Right-continuous nondecreasing step function: value(x) is values[i] for
/// the largest breakpoints[i] <= x, and 0 before the first breakpoint.
struct StepFunction {
  std::vector<double> breakpoints;
  std::vector<double> values;
};

/// rho_s(a) = |{p : t_ps / min_s' t_ps' <= a}| / |P|, one step function per
/// solver in table order.
std::vector<StepFunction> performance_profile(const ProfileTable& table);

/// d_s(k) = |{p : t_ps <= k (n_p + 1)}| / |P|.
std::vector<StepFunction> data_profile(const ProfileTable& table);

/// CSV with columns solver,breakpoint,value,kind,tau; kind is perf or data.
void write_profiles_csv(std::ostream& out, const std::vector<ProfileTable>& tables);

/// JSONL emission for one run history (fields: problem, solver, eval_index,
/// f, violation, plus n for data profiles; non-finite numbers become null).
void write_history_jsonl(std::ostream& out, const RunHistory& history);

/// Parses JSONL lines, grouping by (problem, solver). `origin` labels error
/// messages; malformed lines throw std::runtime_error with the line number.
std::vector<RunHistory> parse_history_jsonl(std::istream& in, const std::string& origin);

}  // namespace logds
