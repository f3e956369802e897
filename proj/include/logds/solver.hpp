#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "logds/merit.hpp"
#include "logds/polyhedral.hpp"
#include "logds/problem.hpp"
#include "logds/surrogate.hpp"

namespace logds {

enum class LinearMode { penalty, conforming };

struct SolverConfig {
  double alpha0 = 1.0;          // initial stepsize
  double phi = 1.0;             // >= 1, expansion on success
  double theta_alpha = 0.5;     // in (0,1), contraction on failure
  double gamma = 1e-9;          // forcing constant, xi(a) = gamma a^2
  double beta = 1.0 + 1e-9;     // > 1, penalty-update exponent
  double zeta = 1e-2;           // in (0,1), penalty contraction
  double nu = 2.0;              // in (1,2], penalty exponent
  double rho_log0 = 1e-1;       // initial barrier parameter
  double epsilon_active = 1e-5; // eps-activity threshold
  int max_evals = 2000;
  double alpha_tol = 1e-8;
  LinearMode linear_mode = LinearMode::penalty;
  bool search_enabled = true;
  double feasibility_tol = 1e-4;  // c(x) threshold for best-feasible reporting

  void validate() const;
};

/// Sufficient-decrease threshold xi(alpha) = gamma * alpha^2.
double forcing(double alpha, double gamma);

/// Both penalty parameters are updated only when the stepsize strictly
/// decreased (unsuccessful iteration):
///   rho_log *= zeta  iff  alpha_next <= min{rho_log^beta, g_min^2}
///   rho_ext *= zeta  iff  alpha_next <= min{rho_log^beta, rho_ext^beta, g_min^2}
/// with both tests reading the pre-update values. g_min is +inf when the log
/// group is empty. Returns (rho_log', rho_ext').
std::pair<double, double> step3_update(double alpha_next, double alpha_prev, double rho_log,
                                       double rho_ext, double g_min, double beta, double zeta);

enum class IterationKind { search_success, poll_success, unsuccessful };

const char* to_string(IterationKind kind);

struct IterationTrace {
  int k = 0;
  IterationKind kind = IterationKind::unsuccessful;
  Vector x;        // iterate x_{k+1}
  double merit;    // Z(x_{k+1}; rho_k), the value used in the decrease test
  double alpha_before, alpha_after;
  double rho_log_before, rho_log_after;
  double rho_ext_before, rho_ext_after;
  double g_min;    // min |g_l(x_{k+1})| over the log group, +inf when empty
  int evals_used;  // cumulative
};

enum class RunStatus { alpha_tol, budget };

const char* to_string(RunStatus status);

struct RunResult {
  std::string problem;
  RunStatus status = RunStatus::budget;
  int iterations = 0;
  int evals = 0;
  double final_alpha = 0.0;
  double final_rho_log = 0.0;
  double final_rho_ext = 0.0;
  EvaluationRecord best_merit;                   // best-merit iterate
  std::optional<EvaluationRecord> best_feasible; // best f with c(x) <= tol, any trial
  std::vector<IterationTrace> trace;
  std::vector<EvaluationRecord> history;
};

struct SolverState {
  Vector x;
  double alpha = 0.0;
  double rho_log = 0.0, rho_ext = 0.0;
  int eval_count = 0;
  std::vector<EvaluationRecord> history;
  int iter_index = 0;
  IterationKind last_iteration_kind = IterationKind::unsuccessful;
};

struct PollOutcome {
  bool success = false;
  std::optional<Vector> direction;
  bool budget_exhausted = false;
};

struct SearchOutcome {
  bool success = false;  // false means skip (the poll step runs)
};

/// One LOG-DS run over a fixed problem. The iteration is strictly sequential;
/// independent runs over distinct Solver instances may execute concurrently.
class Solver {
public:
  /// Oracle for the search step: proposes a trial point near `center` from
  /// the history, or declines. Defaults to the quadratic-surrogate oracle.
  using SearchOracle =
      std::function<std::optional<Vector>(const SolverState&, const Vector& center, double radius)>;

  Solver(const Problem& problem, SolverConfig config);

  /// Evaluates x0, fixes rho_ext0 = 1/max{|f(x0)|, 10}, and seeds the state.
  /// Throws std::runtime_error when f(x0) is not finite.
  void init();

  PollOutcome poll_step(const DirectionSet& directions);
  SearchOutcome search_step();

  /// Directions for the current iterate: the default set in penalty mode,
  /// eps-tangent-cone generators in conforming mode, then reordered against
  /// the simplex-gradient ascent indicator.
  DirectionSet poll_directions() const;

  RunResult run();

  const SolverState& state() const { return state_; }
  const ConstraintPartition& partition() const { return partition_; }
  const Problem& working_problem() const { return work_; }
  const ScaledPolyhedron& polyhedron() const { return poly_; }

  void set_search_oracle(SearchOracle oracle) { search_oracle_ = std::move(oracle); }

private:
  MeritParams params() const;
  EvaluationRecord& evaluate(const Vector& x);
  bool sufficient_decrease(double trial_merit) const;
  double gmin_at(const EvaluationRecord& rec) const;
  std::optional<Vector> surrogate_candidate(const Vector& center, double radius) const;
  std::optional<Vector> ascent_indicator() const;

  Problem original_;
  Problem work_;  // linear rows folded into the penalty in penalty mode
  SolverConfig config_;
  ConstraintPartition partition_;
  ScaledPolyhedron poly_;
  SolverState state_;
  EvaluationRecord incumbent_;
  double incumbent_merit_ = kInf;  // at the current penalty parameters
  bool budget_exhausted_ = false;
  SearchOracle search_oracle_;
};

/// Convenience wrapper: construct, init, run.
RunResult run(const Problem& problem, const SolverConfig& config);

/// JSONL trace line with exactly the documented field names; non-finite
/// numbers are emitted as null.
std::string trace_to_jsonl(const IterationTrace& t);

/// Run summary as a JSON object string.
std::string run_result_to_json(const RunResult& result);

}  // namespace logds
