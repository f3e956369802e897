#include "logds/solver.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace logds {

using ordered_json = nlohmann::ordered_json;

void SolverConfig::validate() const {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  if (!(phi >= 1.0)) throw std::invalid_argument("phi must be >= 1");
  if (!(theta_alpha > 0.0 && theta_alpha < 1.0))
    throw std::invalid_argument("theta_alpha must lie in (0,1)");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(beta > 1.0)) throw std::invalid_argument("beta must be > 1");
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0,1)");
  if (!(nu > 1.0 && nu <= 2.0)) throw std::invalid_argument("nu must lie in (1,2]");
  if (!(rho_log0 > 0.0)) throw std::invalid_argument("rho_log0 must be positive");
  if (!(epsilon_active > 0.0)) throw std::invalid_argument("epsilon_active must be positive");
  if (max_evals < 1) throw std::invalid_argument("max_evals must be positive");
  if (!(alpha_tol > 0.0)) throw std::invalid_argument("alpha_tol must be positive");
  if (!(feasibility_tol > 0.0)) throw std::invalid_argument("feasibility_tol must be positive");
}

double forcing(double alpha, double gamma) { return gamma * alpha * alpha; }

std::pair<double, double> step3_update(double alpha_next, double alpha_prev, double rho_log,
                                       double rho_ext, double g_min, double beta, double zeta) {
  double next_log = rho_log;
  double next_ext = rho_ext;
  if (alpha_next < alpha_prev) {
    const double gm2 = g_min * g_min;
    const double log_cap = std::pow(rho_log, beta);
    if (alpha_next <= std::min(log_cap, gm2)) next_log = zeta * rho_log;
    if (alpha_next <= std::min({log_cap, std::pow(rho_ext, beta), gm2}))
      next_ext = zeta * rho_ext;
  }
  return {next_log, next_ext};
}

const char* to_string(IterationKind kind) {
  switch (kind) {
    case IterationKind::search_success: return "search-success";
    case IterationKind::poll_success: return "poll-success";
    case IterationKind::unsuccessful: return "unsuccessful";
  }
  return "?";
}

const char* to_string(RunStatus status) {
  return status == RunStatus::alpha_tol ? "alpha-tol" : "budget";
}

Solver::Solver(const Problem& problem, SolverConfig config)
    : original_(problem),
      work_(config.linear_mode == LinearMode::penalty ? fold_linear_into_penalty(problem)
                                                      : problem),
      config_(std::move(config)) {
  config_.validate();
  partition_ = partition_constraints(work_);
  if (config_.linear_mode == LinearMode::conforming && original_.linear())
    poly_ = scale_rows(original_.linear()->A, original_.linear()->b, original_.bounds(),
                       original_.dim());
  else
    poly_ = box_polyhedron(original_.bounds(), original_.dim());
}

MeritParams Solver::params() const {
  return MeritParams{state_.rho_log, state_.rho_ext, config_.nu};
}

EvaluationRecord& Solver::evaluate(const Vector& x) {
  EvaluationRecord rec = merit_eval(work_, partition_, params(), x, state_.eval_count + 1);
  ++state_.eval_count;
  state_.history.push_back(std::move(rec));
  return state_.history.back();
}

void Solver::init() {
  state_ = SolverState{};
  state_.history.reserve(static_cast<std::size_t>(config_.max_evals) + 16);
  state_.alpha = config_.alpha0;
  state_.rho_log = config_.rho_log0;
  state_.rho_ext = 1.0;  // provisional until f(x0) is known

  EvaluationRecord& rec = evaluate(work_.x0());
  if (rec.evaluator_failure || !std::isfinite(rec.f))
    throw std::runtime_error(work_.name() + ": objective or constraints not finite at x0");

  state_.rho_ext = 1.0 / std::max(std::fabs(rec.f), 10.0);
  rec.merit = merit_from_raw(rec.f, rec.g, rec.h, partition_, params());
  state_.x = rec.x;
  incumbent_ = rec;
  incumbent_merit_ = rec.merit;
  budget_exhausted_ = false;
}

bool Solver::sufficient_decrease(double trial_merit) const {
  return trial_merit <= incumbent_merit_ - forcing(state_.alpha, config_.gamma);
}

double Solver::gmin_at(const EvaluationRecord& rec) const {
  double gmin = kInf;
  for (int l : partition_.log_set) gmin = std::min(gmin, std::fabs(rec.g[l]));
  return gmin;
}

PollOutcome Solver::poll_step(const DirectionSet& directions) {
  PollOutcome out;
  for (const Vector& d : directions.dirs) {
    Vector trial = state_.x + state_.alpha * d;
    if (!in_X(poly_, trial)) continue;  // linear membership is free
    if (state_.eval_count >= config_.max_evals) {
      out.budget_exhausted = true;
      budget_exhausted_ = true;
      return out;  // partial poll; stepsize untouched
    }
    EvaluationRecord& rec = evaluate(trial);
    if (sufficient_decrease(rec.merit)) {
      out.success = true;
      out.direction = d;
      incumbent_ = rec;
      incumbent_merit_ = rec.merit;
      state_.x = incumbent_.x;
      state_.alpha *= config_.phi;
      return out;
    }
  }
  state_.alpha *= config_.theta_alpha;
  return out;
}

SearchOutcome Solver::search_step() {
  SearchOutcome out;
  if (!config_.search_enabled) return out;
  const double radius = 2.0 * state_.alpha;

  std::optional<Vector> cand = search_oracle_
                                   ? search_oracle_(state_, state_.x, radius)
                                   : surrogate_candidate(state_.x, radius);
  if (!cand) return out;

  Vector z = *cand;
  const Bounds& bounds = original_.bounds();
  for (int i = 0; i < z.size(); ++i) z[i] = std::clamp(z[i], bounds.lo[i], bounds.hi[i]);
  if (!in_X(poly_, z)) return out;                    // free linear test
  if ((z - state_.x).squaredNorm() == 0.0) return out;  // model made no progress

  if (state_.eval_count >= config_.max_evals) {
    budget_exhausted_ = true;
    return out;
  }
  EvaluationRecord& rec = evaluate(z);
  if (sufficient_decrease(rec.merit)) {
    out.success = true;
    incumbent_ = rec;
    incumbent_merit_ = rec.merit;
    state_.x = incumbent_.x;
    state_.alpha *= config_.phi;
  }
  // A failed search trial costs one evaluation but leaves alpha to the poll.
  return out;
}

std::optional<Vector> Solver::surrogate_candidate(const Vector& center, double radius) const {
  const int n = work_.dim();
  auto records = select_samples(state_.history, center, radius);
  // A full poll sweep leaves the newest points co-spherical around the
  // incumbent, which is a singular interpolation set; the incumbent itself
  // restores poisedness.
  bool have_center = false;
  for (const EvaluationRecord* rec : records)
    if ((rec->x - incumbent_.x).norm() <= 1e-12) have_center = true;
  if (!have_center && (incumbent_.x - center).norm() <= radius)
    records.push_back(&incumbent_);
  if (static_cast<int>(records.size()) < n + 1) return std::nullopt;

  auto sample_set = [&](auto&& value_of) {
    SampleSet ss;
    ss.center = center;
    ss.radius = radius;
    ss.points.reserve(records.size());
    ss.values.reserve(records.size());
    for (const EvaluationRecord* rec : records) {
      ss.points.push_back(rec->x);
      ss.values.push_back(value_of(*rec));
    }
    return ss;
  };

  auto f_model = build_model(sample_set([](const EvaluationRecord& r) { return r.f; }));
  if (!f_model) return std::nullopt;

  std::vector<QuadraticModel> g_models;
  g_models.reserve(work_.num_ineq());
  for (int i = 0; i < work_.num_ineq(); ++i) {
    auto m = build_model(sample_set([i](const EvaluationRecord& r) { return r.g[i]; }));
    g_models.push_back(m ? *m : QuadraticModel::constant(center, incumbent_.g[i]));
  }
  std::vector<QuadraticModel> h_models;
  h_models.reserve(work_.num_eq());
  for (int j = 0; j < work_.num_eq(); ++j) {
    auto m = build_model(sample_set([j](const EvaluationRecord& r) { return r.h[j]; }));
    h_models.push_back(m ? *m : QuadraticModel::constant(center, incumbent_.h[j]));
  }
  return merit_model_min(*f_model, g_models, h_models, partition_, params(), center, radius);
}

std::optional<Vector> Solver::ascent_indicator() const {
  const double radius = 2.0 * state_.alpha;
  auto records = select_samples(state_.history, state_.x, radius);

  SampleSet ss;
  ss.center = state_.x;
  ss.radius = radius;
  ss.points.push_back(state_.x);
  ss.values.push_back(incumbent_merit_);
  MeritParams p = params();
  for (const EvaluationRecord* rec : records) {
    if ((rec->x - state_.x).norm() <= 1e-12) continue;
    double m = merit_from_raw(rec->f, rec->g, rec->h, partition_, p);
    if (!std::isfinite(m)) continue;
    ss.points.push_back(rec->x);
    ss.values.push_back(m);
  }
  return simplex_gradient(ss);
}

DirectionSet Solver::poll_directions() const {
  DirectionSet base = default_directions(work_.dim());
  if (config_.linear_mode == LinearMode::conforming)
    base = tangent_cone_generators(poly_, state_.x, config_.epsilon_active, base);
  DirectionSet ordered;
  ordered.dirs = order_directions(base.dirs, ascent_indicator());
  return ordered;
}

RunResult Solver::run() {
  if (state_.history.empty()) init();

  RunResult result;
  result.problem = original_.name();

  EvaluationRecord best_merit = incumbent_;
  auto consider_best_merit = [&](const EvaluationRecord& rec) {
    if (rec.merit < best_merit.merit) best_merit = rec;
  };

  while (true) {
    if (state_.alpha < config_.alpha_tol) {
      result.status = RunStatus::alpha_tol;
      break;
    }
    if (budget_exhausted_ || state_.eval_count >= config_.max_evals) {
      result.status = RunStatus::budget;
      break;
    }

    const double alpha_before = state_.alpha;
    const double rho_log_before = state_.rho_log;
    const double rho_ext_before = state_.rho_ext;
    // The incumbent merit must be re-expressed whenever rho changed.
    incumbent_merit_ = merit_from_raw(incumbent_.f, incumbent_.g, incumbent_.h, partition_,
                                      params());

    IterationKind kind = IterationKind::unsuccessful;
    SearchOutcome search = search_step();
    if (search.success) {
      kind = IterationKind::search_success;
    } else if (!budget_exhausted_) {
      PollOutcome poll = poll_step(poll_directions());
      if (poll.success) kind = IterationKind::poll_success;
    }
    if (kind != IterationKind::unsuccessful) consider_best_merit(incumbent_);

    const double alpha_after = state_.alpha;
    const double gmin = gmin_at(incumbent_);
    auto [next_log, next_ext] = step3_update(alpha_after, alpha_before, rho_log_before,
                                             rho_ext_before, gmin, config_.beta, config_.zeta);
    state_.rho_log = next_log;
    state_.rho_ext = next_ext;

    IterationTrace t;
    t.k = state_.iter_index;
    t.kind = kind;
    t.x = state_.x;
    t.merit = incumbent_merit_;
    t.alpha_before = alpha_before;
    t.alpha_after = alpha_after;
    t.rho_log_before = rho_log_before;
    t.rho_log_after = next_log;
    t.rho_ext_before = rho_ext_before;
    t.rho_ext_after = next_ext;
    t.g_min = gmin;
    t.evals_used = state_.eval_count;
    result.trace.push_back(std::move(t));

    state_.last_iteration_kind = kind;
    ++state_.iter_index;
  }

  result.iterations = state_.iter_index;
  result.evals = state_.eval_count;
  result.final_alpha = state_.alpha;
  result.final_rho_log = state_.rho_log;
  result.final_rho_ext = state_.rho_ext;
  result.best_merit = best_merit;
  for (const EvaluationRecord& rec : state_.history) {
    if (rec.evaluator_failure || !std::isfinite(rec.f)) continue;
    if (rec.violation > config_.feasibility_tol) continue;
    if (!result.best_feasible || rec.f < result.best_feasible->f) result.best_feasible = rec;
  }
  result.history = state_.history;
  return result;
}

RunResult run(const Problem& problem, const SolverConfig& config) {
  Solver solver(problem, config);
  solver.init();
  return solver.run();
}

namespace {

ordered_json json_num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

ordered_json record_json(const EvaluationRecord& rec) {
  ordered_json j;
  j["x"] = std::vector<double>(rec.x.data(), rec.x.data() + rec.x.size());
  j["f"] = json_num(rec.f);
  j["merit"] = json_num(rec.merit);
  j["violation"] = json_num(rec.violation);
  j["eval_index"] = rec.eval_index;
  return j;
}

}  // namespace

std::string trace_to_jsonl(const IterationTrace& t) {
  ordered_json j;
  j["k"] = t.k;
  j["kind"] = to_string(t.kind);
  j["x"] = std::vector<double>(t.x.data(), t.x.data() + t.x.size());
  j["merit"] = json_num(t.merit);
  j["alpha_before"] = json_num(t.alpha_before);
  j["alpha_after"] = json_num(t.alpha_after);
  j["rho_log_before"] = json_num(t.rho_log_before);
  j["rho_log_after"] = json_num(t.rho_log_after);
  j["rho_ext_before"] = json_num(t.rho_ext_before);
  j["rho_ext_after"] = json_num(t.rho_ext_after);
  j["g_min"] = json_num(t.g_min);
  j["evals_used"] = t.evals_used;
  return j.dump();
}

std::string run_result_to_json(const RunResult& result) {
  ordered_json j;
  j["problem"] = result.problem;
  j["status"] = to_string(result.status);
  j["iterations"] = result.iterations;
  j["evals"] = result.evals;
  j["final_alpha"] = json_num(result.final_alpha);
  j["final_rho_log"] = json_num(result.final_rho_log);
  j["final_rho_ext"] = json_num(result.final_rho_ext);
  j["best_merit"] = record_json(result.best_merit);
  j["best_feasible"] = result.best_feasible ? record_json(*result.best_feasible)
                                            : ordered_json(nullptr);
  return j.dump(2);
}

}  // namespace logds
