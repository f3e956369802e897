// Acceptance suite: end-to-end solves against analytic optima plus the
// property checks the library must satisfy. Prints one pass/fail line per
// criterion and exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "logds/merit.hpp"
#include "logds/polyhedral.hpp"
#include "logds/problem_io.hpp"
#include "logds/profiles.hpp"
#include "logds/solver.hpp"
#include "logds/surrogate.hpp"
#include "trace_checks.hpp"

using namespace logds;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  int number;
  std::string title;
  std::function<bool(std::string&)> check;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool expect(bool cond, const std::string& what, std::string& detail) {
  if (!cond && detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
  return cond;
}

// ---------------------------------------------------------------------------
// 1. hs12-like: violation <= 1e-4 and |f - (-30)|/30 <= 1e-3 in 2000 evals, <5s
bool criterion1(std::string& detail) {
  auto loaded = builtin_problem("hs12-like");
  SolverConfig config;
  auto start = Clock::now();
  auto result = run(loaded.problem, config);
  double elapsed = seconds_since(start);
  bool ok = true;
  ok &= expect(result.best_feasible.has_value(), "no feasible point found", detail);
  if (result.best_feasible) {
    ok &= expect(result.best_feasible->violation <= 1e-4, "violation > 1e-4", detail);
    double rel = std::fabs(result.best_feasible->f - (-30.0)) / 30.0;
    std::ostringstream msg;
    msg << "relative error " << rel;
    ok &= expect(rel <= 1e-3, msg.str(), detail);
  }
  ok &= expect(result.evals <= 2000, "budget exceeded", detail);
  ok &= expect(elapsed < 5.0, "runtime >= 5 s", detail);
  return ok;
}

// ---------------------------------------------------------------------------
// 2. hs21-like: f <= -99.95 with violation <= 1e-4 in 2000 evals
bool criterion2(std::string& detail) {
  auto loaded = builtin_problem("hs21-like");
  SolverConfig config;
  auto result = run(loaded.problem, config);
  bool ok = expect(result.best_feasible.has_value(), "no feasible point found", detail);
  if (result.best_feasible) {
    ok &= expect(result.best_feasible->violation <= 1e-4, "violation > 1e-4", detail);
    std::ostringstream msg;
    msg << "f = " << result.best_feasible->f;
    ok &= expect(result.best_feasible->f <= -99.95, msg.str(), detail);
  }
  ok &= expect(result.evals <= 2000, "budget exceeded", detail);
  return ok;
}

// ---------------------------------------------------------------------------
// 3. circle-eq: violation <= 1e-4 and |f + sqrt(2)| <= 1e-2 in 2000 evals
bool criterion3(std::string& detail) {
  auto loaded = builtin_problem("circle-eq");
  SolverConfig config;
  auto result = run(loaded.problem, config);
  bool ok = expect(result.best_feasible.has_value(), "no feasible point found", detail);
  if (result.best_feasible) {
    ok &= expect(result.best_feasible->violation <= 1e-4, "violation > 1e-4", detail);
    double err = std::fabs(result.best_feasible->f - (-std::sqrt(2.0)));
    std::ostringstream msg;
    msg << "|f - f*| = " << err;
    ok &= expect(err <= 1e-2, msg.str(), detail);
  }
  ok &= expect(result.evals <= 2000, "budget exceeded", detail);
  return ok;
}

// ---------------------------------------------------------------------------
// 4. trace invariants on every suite run (both linear modes), zero violations
bool criterion4(std::string& detail) {
  bool ok = true;
  for (LinearMode mode : {LinearMode::penalty, LinearMode::conforming}) {
    for (const auto& lp : builtin_suite()) {
      SolverConfig config;
      config.linear_mode = mode;
      Solver solver(lp.problem, config);
      solver.init();
      auto result = solver.run();
      auto report = logds::testing::check_trace_invariants(result, solver, config);
      if (report.violations > 0) {
        std::ostringstream msg;
        msg << lp.problem.name() << (mode == LinearMode::penalty ? "/penalty" : "/conforming")
            << ": " << report.violations << " violations (" << report.messages.front() << ")";
        ok &= expect(false, msg.str(), detail);
      }
    }
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 5. step-3 conformance table (>= 12 hand-built cases)
bool criterion5(std::string& detail) {
  const double beta = 1.0 + 1e-9;
  const double zeta = 1e-2;
  struct Case {
    double alpha_next, alpha_prev, rho_log, rho_ext, g_min;
    bool expect_log, expect_ext;
  };
  const std::vector<Case> cases = {
      {1e-3, 2e-3, 0.1, 0.1, 0.5, true, true},       // both pass
      {1e-3, 1e-3, 0.1, 0.1, 0.5, false, false},     // alpha not decreased
      {2e-3, 1e-3, 0.1, 0.1, 0.5, false, false},     // alpha increased
      {1e-3, 2e-3, 0.1, 0.1, 0.01, false, false},    // g_min^2 = 1e-4 < alpha
      {1e-4, 2e-4, 0.1, 0.1, 0.01, true, true},      // g_min^2 boundary (<=)
      {0.5, 1.0, 0.1, 0.1, 10.0, false, false},      // rho_log cap blocks
      {1e-3, 2e-3, 0.1, 1e-4, 0.5, true, false},     // ext blocked by own cap
      {5e-2, 1e-1, 0.9, 1e-6, 1.0, true, false},
      {1e-3, 2e-3, 0.1, 0.1, kInf, true, true},      // empty log group
      {0.5, 1.0, 0.1, 0.1, kInf, false, false},      // empty group, cap fails
      {1e-6, 2e-6, 0.05, 0.05, 0.1, true, true},
      {1e-3, 2e-3, 0.1, 1e-5, kInf, true, false},    // K_ext subset of K_log
      {std::pow(0.1, beta), 1.0, 0.1, 0.1, kInf, true, true},  // exact cap
      {1e-12, 2e-12, 1e-3, 1e-3, 1e-3, true, true},
  };
  bool ok = true;
  int idx = 0;
  for (const Case& c : cases) {
    auto [next_log, next_ext] =
        step3_update(c.alpha_next, c.alpha_prev, c.rho_log, c.rho_ext, c.g_min, beta, zeta);
    bool got_log = next_log != c.rho_log;
    bool got_ext = next_ext != c.rho_ext;
    std::ostringstream msg;
    msg << "case " << idx << ": got (" << got_log << "," << got_ext << ") expected ("
        << c.expect_log << "," << c.expect_ext << ")";
    ok &= expect(got_log == c.expect_log && got_ext == c.expect_ext, msg.str(), detail);
    if (got_log) ok &= expect(next_log == zeta * c.rho_log, "log update not exactly zeta", detail);
    if (got_ext) ok &= expect(next_ext == zeta * c.rho_ext, "ext update not exactly zeta", detail);
    ++idx;
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 6. surrogate exactness
bool criterion6(std::string& detail) {
  std::mt19937 rng(60601);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  bool ok = true;

  // quadratic interpolation reproduces random quadratics (n <= 4) to 1e-8
  for (int n = 1; n <= 4; ++n) {
    const int q = (n + 1) * (n + 2) / 2;
    int built = 0;
    for (int trial = 0; trial < 60 && built < 25; ++trial) {
      double c0 = coef(rng);
      Vector g0(n);
      Matrix H0 = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) g0[i] = coef(rng);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) H0(i, j) = H0(j, i) = coef(rng);
      SampleSet ss;
      ss.center = Vector::Zero(n);
      ss.radius = 2.0;
      for (int i = 0; i < q; ++i) {
        Vector s(n);
        for (int d = 0; d < n; ++d) s[d] = coef(rng) / 2.0;
        ss.points.push_back(s);
        ss.values.push_back(c0 + g0.dot(s) + 0.5 * s.dot(H0 * s));
      }
      auto model = build_model(ss);
      if (!model) continue;
      ++built;
      double scale = 1.0;
      for (double v : ss.values) scale = std::max(scale, std::fabs(v));
      for (int i = 0; i < q; ++i)
        ok &= expect(std::fabs(model->value(ss.points[i]) - ss.values[i]) <= 1e-8 * scale,
                     "interpolation residual > 1e-8 relative", detail);
    }
    ok &= expect(built >= 25, "too many declined interpolation draws", detail);
  }

  // MFN returns ||H||_F <= 1e-8 on affine data
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    double c0 = coef(rng);
    Vector g0(n);
    for (int i = 0; i < n; ++i) g0[i] = coef(rng);
    SampleSet ss;
    ss.center = Vector::Zero(n);
    ss.radius = 2.0;
    const int q = (n + 1) * (n + 2) / 2;
    const int p = std::min(n + 1 + trial % 3, q - 1);
    for (int i = 0; i < p; ++i) {
      Vector s(n);
      for (int d = 0; d < n; ++d) s[d] = coef(rng) / 2.0;
      ss.points.push_back(s);
      ss.values.push_back(c0 + g0.dot(s));
    }
    auto model = build_model(ss);
    if (!model) continue;
    ok &= expect(model->H.norm() <= 1e-8, "MFN curvature on affine data", detail);
  }

  // simplex gradients match affine-merit gradients to 1e-10
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    Vector g0(n);
    for (int i = 0; i < n; ++i) g0[i] = coef(rng);
    SampleSet ss;
    ss.center = Vector::Zero(n);
    ss.radius = 2.0;
    ss.points.push_back(ss.center);
    ss.values.push_back(0.0);
    for (int i = 0; i < n; ++i) {
      Vector s = 0.4 * Vector::Unit(n, i) + 0.02 * Vector::Ones(n);
      ss.points.push_back(s);
      ss.values.push_back(g0.dot(s));
    }
    auto g = simplex_gradient(ss);
    ok &= expect(g.has_value(), "simplex gradient declined", detail);
    if (g)
      ok &= expect((*g - g0).norm() <= 1e-10 * std::max(1.0, g0.norm()),
                   "simplex gradient error > 1e-10", detail);
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 7. profile oracle equivalence on 100 random tables + boundary case
bool criterion7(std::string& detail) {
  bool ok = true;

  // boundary case of the convergence test
  RunHistory h;
  h.problem = "p";
  h.solver = "s";
  h.n = 2;
  h.entries.push_back({1, 1.0, 0.0});
  ok &= expect(convergence_eval_count(h, 10.0, 0.0, 0.1) == 1.0,
               "convergence boundary case failed", detail);

  std::mt19937 rng(70707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> tdist(1, 60);
  std::uniform_int_distribution<int> ndist(1, 9);

  auto oracle_perf = [](const ProfileTable& table, std::size_t s, double alpha) {
    int count = 0;
    for (std::size_t p = 0; p < table.problems.size(); ++p) {
      double best = kInf;
      for (std::size_t s2 = 0; s2 < table.solvers.size(); ++s2)
        if (table.t[p][s2] < best) best = table.t[p][s2];
      if (!std::isfinite(table.t[p][s]) || !std::isfinite(best)) continue;
      if (table.t[p][s] / best <= alpha) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(table.problems.size());
  };
  auto oracle_data = [](const ProfileTable& table, std::size_t s, double kappa) {
    int count = 0;
    for (std::size_t p = 0; p < table.problems.size(); ++p) {
      if (!std::isfinite(table.t[p][s])) continue;
      if (table.t[p][s] / (table.n_p[p] + 1) <= kappa) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(table.problems.size());
  };

  for (int trial = 0; trial < 100 && ok; ++trial) {
    ProfileTable table;
    const int P = 10, S = 3;
    for (int p = 0; p < P; ++p) table.problems.push_back("p" + std::to_string(p));
    for (int s = 0; s < S; ++s) table.solvers.push_back("s" + std::to_string(s));
    table.n_p.resize(P);
    table.t.assign(P, std::vector<double>(S));
    for (int p = 0; p < P; ++p) {
      table.n_p[p] = ndist(rng);
      for (int s = 0; s < S; ++s)
        table.t[p][s] = (u(rng) < 0.3) ? kInf : static_cast<double>(tdist(rng));
    }
    auto perf = performance_profile(table);
    auto data = data_profile(table);
    for (int s = 0; s < S; ++s) {
      for (std::size_t i = 0; i < perf[s].breakpoints.size(); ++i)
        ok &= expect(perf[s].values[i] == oracle_perf(table, s, perf[s].breakpoints[i]),
                     "performance profile disagrees with the oracle", detail);
      for (std::size_t i = 0; i < data[s].breakpoints.size(); ++i)
        ok &= expect(data[s].values[i] == oracle_data(table, s, data[s].breakpoints[i]),
                     "data profile disagrees with the oracle", detail);
    }
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 8. polyhedral properties
bool criterion8(std::string& detail) {
  bool ok = true;
  std::mt19937 rng(80808);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> pow2(-8, 8);

  // scaling invariance: power-of-two row rescalings leave outputs identical
  int trials = 0;
  while (trials < 1000) {
    const int n = 3;
    Matrix A(2, n);
    Vector b(2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = coef(rng);
      b[i] = coef(rng);
    }
    if (A.row(0).norm() < 0.1 || A.row(1).norm() < 0.1) continue;
    ++trials;
    Matrix A2 = A;
    Vector b2 = b;
    for (int i = 0; i < 2; ++i) {
      double c = std::ldexp(1.0, pow2(rng));
      A2.row(i) *= c;
      b2[i] *= c;
    }
    auto base = scale_rows(A, b, Bounds::unbounded(n), n);
    auto scaled = scale_rows(A2, b2, Bounds::unbounded(n), n);
    ok &= expect(base.A_bar == scaled.A_bar && base.b_bar == scaled.b_bar,
                 "scaled rows differ under positive rescaling", detail);
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = coef(rng);
    ok &= expect(eps_active(base, x, 1e-5) == eps_active(scaled, x, 1e-5),
                 "eps-active sets differ under rescaling", detail);
    if (!ok) break;
  }

  // cone generators satisfy the active rows to 1e-10
  int produced = 0;
  for (int trial = 0; trial < 400 && produced < 200; ++trial) {
    const int n = 4;
    const int r = 1 + trial % 3;
    Matrix A(r, n);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = coef(rng);
    bool weak = false;
    for (int i = 0; i < r; ++i)
      if (A.row(i).norm() < 0.3) weak = true;
    if (weak) continue;
    Vector x = Vector::Zero(n);
    Vector b = A * x;
    auto poly = scale_rows(A, b, Bounds::unbounded(n), n);
    try {
      auto gen = tangent_cone_generators(poly, x, 1e-5, default_directions(n));
      ++produced;
      for (const Vector& d : gen.dirs)
        for (int i = 0; i < r; ++i)
          ok &= expect(poly.A_bar.row(i).dot(d) <= 1e-10, "generator violates an active row",
                       detail);
    } catch (const DegenerateConeError&) {
      continue;
    }
  }
  ok &= expect(produced >= 200, "too few full-rank cone instances", detail);

  // degenerate stacks raise the documented error
  {
    Matrix A(2, 2);
    A << 1, 0, -1, 0;
    Vector b = Vector::Zero(2);
    auto poly = scale_rows(A, b, Bounds::unbounded(2), 2);
    bool threw = false;
    try {
      Vector x(2);
      x << 0.0, 1.0;
      tangent_cone_generators(poly, x, 1e-5, default_directions(2));
    } catch (const DegenerateConeError&) {
      threw = true;
    }
    ok &= expect(threw, "degenerate stack did not raise", detail);
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 9. barrier contract: random log-group-violating points get +inf merit and
//    never become iterates
bool criterion9(std::string& detail) {
  bool ok = true;
  std::mt19937 rng(90909);
  for (const auto& lp : builtin_suite()) {
    SolverConfig config;
    Solver solver(lp.problem, config);
    solver.init();
    const auto& part = solver.partition();
    if (part.log_set.empty()) continue;
    const Problem& work = solver.working_problem();
    MeritParams params{config.rho_log0, 0.5, config.nu};

    std::uniform_real_distribution<double> coord(-6.0, 6.0);
    int rejected = 0;
    for (int i = 0; i < 500000 && rejected < 1000; ++i) {
      Vector x(work.dim());
      for (int d = 0; d < work.dim(); ++d) x[d] = coord(rng);
      Vector g = work.eval_ineq(x);
      bool violates = false;
      for (int l : part.log_set)
        if (std::isfinite(g[l]) && g[l] >= 0.0) violates = true;
      if (!violates) continue;
      ++rejected;
      auto rec = merit_eval(work, part, params, x);
      ok &= expect(rec.merit == kInf, "barrier point got finite merit", detail);
    }
    ok &= expect(rejected >= 1000,
                 lp.problem.name() + ": sampler found too few barrier points", detail);

    // no iterate of a real run crosses the barrier
    auto result = solver.run();
    for (const auto& t : result.trace) {
      Vector g = work.eval_ineq(t.x);
      for (int l : part.log_set)
        ok &= expect(g[l] < 0.0, "iterate crossed the log-group boundary", detail);
    }
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 10. penalty-vs-conforming ablation completes with valid profile CSVs, <60 s
bool criterion10(std::string& detail) {
  auto start = Clock::now();
  bool ok = true;
  std::vector<RunHistory> histories;
  for (LinearMode mode : {LinearMode::penalty, LinearMode::conforming}) {
    const std::string solver_id =
        mode == LinearMode::penalty ? "logds-penalty" : "logds-conforming";
    for (const auto& lp : builtin_suite()) {
      SolverConfig config;
      config.linear_mode = mode;
      auto result = run(lp.problem, config);
      RunHistory h;
      h.problem = result.problem;
      h.solver = solver_id;
      h.n = lp.problem.dim();
      for (const auto& rec : result.history) h.entries.push_back({rec.eval_index, rec.f, rec.violation});
      histories.push_back(std::move(h));
    }
  }
  ok &= expect(histories.size() == 12, "expected 12 ablation runs", detail);

  std::vector<ProfileTable> tables;
  for (double tau : {1e-1, 1e-3, 1e-5}) tables.push_back(build_table(histories, tau));
  std::ostringstream csv;
  write_profiles_csv(csv, tables);
  const std::string content = csv.str();
  ok &= expect(content.rfind("solver,breakpoint,value,kind,tau\n", 0) == 0,
               "CSV header malformed", detail);
  ok &= expect(content.find("logds-penalty") != std::string::npos, "penalty rows missing",
               detail);
  ok &= expect(content.find("logds-conforming") != std::string::npos,
               "conforming rows missing", detail);
  ok &= expect(content.find(",perf,") != std::string::npos, "perf rows missing", detail);
  ok &= expect(content.find(",data,") != std::string::npos, "data rows missing", detail);

  double elapsed = seconds_since(start);
  std::ostringstream msg;
  msg << "ablation took " << elapsed << " s";
  ok &= expect(elapsed < 60.0, msg.str(), detail);
  return ok;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "end-to-end solve, inequality-only (hs12-like)", criterion1},
      {2, "end-to-end solve, linear + bounds (hs21-like)", criterion2},
      {3, "end-to-end solve, equality (circle-eq)", criterion3},
      {4, "trace invariants on every suite run", criterion4},
      {5, "step-3 unit conformance table", criterion5},
      {6, "surrogate exactness", criterion6},
      {7, "profile oracle equivalence", criterion7},
      {8, "polyhedral properties", criterion8},
      {9, "barrier contract", criterion9},
      {10, "penalty-vs-conforming ablation", criterion10},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool passed = false;
    try {
      passed = c.check(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (passed) {
      std::printf("[PASS] criterion %2d: %s\n", c.number, c.title.c_str());
    } else {
      ++failures;
      std::printf("[FAIL] criterion %2d: %s (%s)\n", c.number, c.title.c_str(),
                  detail.c_str());
    }
    std::fflush(stdout);
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
