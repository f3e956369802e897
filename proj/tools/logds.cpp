#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "logds/problem_io.hpp"
#include "logds/profiles.hpp"
#include "logds/solver.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string problem_name;
  std::string problem_file;
  std::string out_dir = "logds_out";
  logds::SolverConfig config;
  std::string linear_mode = "penalty";
  bool no_search = false;
};

void add_config_flags(CLI::App* cmd, CommonOpts& opts) {
  auto& c = opts.config;
  cmd->add_option("--max-evals", c.max_evals, "Evaluation budget")->capture_default_str();
  cmd->add_option("--alpha0", c.alpha0, "Initial stepsize")->capture_default_str();
  cmd->add_option("--alpha-tol", c.alpha_tol, "Minimum stepsize tolerance")
      ->capture_default_str();
  cmd->add_option("--phi", c.phi, "Stepsize expansion on success (>= 1)")
      ->capture_default_str();
  cmd->add_option("--theta-alpha", c.theta_alpha, "Stepsize contraction on failure")
      ->capture_default_str();
  cmd->add_option("--gamma", c.gamma, "Forcing constant in xi(a) = gamma a^2")
      ->capture_default_str();
  cmd->add_option("--beta", c.beta, "Penalty-update exponent (> 1)")
      ->default_str("1.000000001");
  cmd->add_option("--zeta", c.zeta, "Penalty contraction factor")->capture_default_str();
  cmd->add_option("--nu", c.nu, "Exterior penalty exponent in (1,2]")->capture_default_str();
  cmd->add_option("--rho-log0", c.rho_log0, "Initial log-barrier parameter")
      ->capture_default_str();
  cmd->add_option("--epsilon-active", c.epsilon_active, "eps-activity threshold")
      ->capture_default_str();
  cmd->add_option("--linear-mode", opts.linear_mode,
                  "Handling of linear inequality rows: penalty|conforming")
      ->check(CLI::IsMember({"penalty", "conforming"}))
      ->capture_default_str();
  cmd->add_flag("--no-search", opts.no_search, "Disable the surrogate search step");
  cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
}

logds::SolverConfig finalize_config(const CommonOpts& opts) {
  logds::SolverConfig c = opts.config;
  c.linear_mode = opts.linear_mode == "conforming" ? logds::LinearMode::conforming
                                                   : logds::LinearMode::penalty;
  c.search_enabled = !opts.no_search;
  return c;
}

logds::LoadedProblem resolve_problem(const CommonOpts& opts) {
  if (!opts.problem_name.empty() && !opts.problem_file.empty())
    throw logds::LoadError("--problem and --problem-file are mutually exclusive");
  if (!opts.problem_name.empty()) return logds::builtin_problem(opts.problem_name);
  if (!opts.problem_file.empty()) return logds::load_problem_file(opts.problem_file);
  throw logds::LoadError("one of --problem or --problem-file is required");
}

logds::RunHistory history_from_result(const logds::RunResult& result,
                                      const std::string& solver_id, int n) {
  logds::RunHistory h;
  h.problem = result.problem;
  h.solver = solver_id;
  h.n = n;
  h.entries.reserve(result.history.size());
  for (const logds::EvaluationRecord& rec : result.history)
    h.entries.push_back({rec.eval_index, rec.f, rec.violation});
  return h;
}

int cmd_solve(const CommonOpts& opts) {
  logds::LoadedProblem loaded = resolve_problem(opts);
  logds::SolverConfig config = finalize_config(opts);
  config.validate();

  logds::RunResult result = logds::run(loaded.problem, config);

  fs::create_directories(opts.out_dir);
  const std::string base = (fs::path(opts.out_dir) / loaded.problem.name()).string();
  {
    std::ofstream trace(base + ".trace.jsonl");
    for (const logds::IterationTrace& t : result.trace)
      trace << logds::trace_to_jsonl(t) << '\n';
  }
  {
    std::ofstream summary(base + ".summary.json");
    summary << logds::run_result_to_json(result) << '\n';
  }

  std::cout << "problem=" << result.problem << " status=" << logds::to_string(result.status)
            << " evals=" << result.evals;
  if (result.best_feasible)
    std::cout << " best_feasible_f=" << result.best_feasible->f
              << " violation=" << result.best_feasible->violation;
  else
    std::cout << " best_feasible_f=none";
  std::cout << '\n';
  return kExitOk;
}

int bench_workers() {
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LOGDS_WORKERS")) {
    int cap = std::atoi(env);
    if (cap >= 1) workers = std::min(workers, static_cast<unsigned>(cap));
  }
  return static_cast<int>(workers);
}

int cmd_bench(const CommonOpts& opts, bool mode_given) {
  std::vector<logds::LoadedProblem> suite = logds::builtin_suite();
  std::vector<logds::LinearMode> modes;
  if (mode_given)
    modes = {opts.linear_mode == "conforming" ? logds::LinearMode::conforming
                                              : logds::LinearMode::penalty};
  else
    modes = {logds::LinearMode::penalty, logds::LinearMode::conforming};

  struct Task {
    const logds::LoadedProblem* problem;
    logds::LinearMode mode;
    std::string solver_id;
    bool ok = false;
    std::string message;
  };
  std::vector<Task> tasks;
  for (const logds::LoadedProblem& lp : suite)
    for (logds::LinearMode mode : modes)
      tasks.push_back({&lp, mode,
                       mode == logds::LinearMode::penalty ? "logds-penalty"
                                                          : "logds-conforming"});
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
    return std::tie(a.problem->problem.name(), a.solver_id) <
           std::tie(b.problem->problem.name(), b.solver_id);
  });

  fs::create_directories(opts.out_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      Task& task = tasks[i];
      try {
        logds::SolverConfig config = finalize_config(opts);
        config.linear_mode = task.mode;
        config.validate();
        logds::RunResult result = logds::run(task.problem->problem, config);
        logds::RunHistory history =
            history_from_result(result, task.solver_id, task.problem->problem.dim());
        fs::path file = fs::path(opts.out_dir) / (task.problem->problem.name() + "__" +
                                                  task.solver_id + ".history.jsonl");
        std::ofstream out(file);
        logds::write_history_jsonl(out, history);
        task.ok = true;
        task.message = "status=" + std::string(logds::to_string(result.status)) +
                       " evals=" + std::to_string(result.evals);
      } catch (const std::exception& e) {
        task.ok = false;
        task.message = e.what();
      }
    }
  };
  const int nworkers = std::min<int>(bench_workers(), static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  int failures = 0;
  for (const Task& task : tasks) {
    if (task.ok) {
      std::cout << task.problem->problem.name() << " [" << task.solver_id
                << "]: " << task.message << '\n';
    } else {
      ++failures;
      std::cerr << task.problem->problem.name() << " [" << task.solver_id
                << "] failed: " << task.message << '\n';
    }
  }
  return failures == static_cast<int>(tasks.size()) ? kExitSolverFailure : kExitOk;
}

int cmd_profile(const std::string& histories_dir, std::vector<double> taus,
                std::string out_path) {
  if (taus.empty()) taus = {1e-1, 1e-3, 1e-5};

  std::vector<fs::path> files;
  if (!fs::is_directory(histories_dir))
    throw logds::LoadError("--histories: '" + histories_dir + "' is not a directory");
  for (const auto& entry : fs::directory_iterator(histories_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw logds::LoadError("--histories: no .jsonl files in '" + histories_dir + "'");

  std::vector<logds::RunHistory> histories;
  for (const fs::path& file : files) {
    std::ifstream in(file);
    try {
      auto parsed = logds::parse_history_jsonl(in, file.string());
      histories.insert(histories.end(), std::make_move_iterator(parsed.begin()),
                       std::make_move_iterator(parsed.end()));
    } catch (const std::runtime_error& e) {
      throw logds::LoadError(e.what());
    }
  }

  std::vector<logds::ProfileTable> tables;
  std::vector<std::string> warnings;
  for (double tau : taus) tables.push_back(logds::build_table(histories, tau, 1e-4, &warnings));
  for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';

  if (out_path.empty()) out_path = "profiles.csv";
  if (fs::is_directory(out_path)) out_path = (fs::path(out_path) / "profiles.csv").string();
  std::ofstream out(out_path);
  if (!out) throw logds::LoadError("cannot open output file '" + out_path + "'");
  logds::write_profiles_csv(out, tables);
  std::cout << "wrote " << out_path << " (" << histories.size() << " histories, "
            << taus.size() << " tau values)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LOG-DS: generating set search with a mixed penalty-log-barrier merit function"};
  app.require_subcommand(1);

  CommonOpts solve_opts;
  CLI::App* solve = app.add_subcommand("solve", "Solve one problem and write trace + summary");
  solve->add_option("--problem", solve_opts.problem_name, "Builtin problem name");
  solve->add_option("--problem-file", solve_opts.problem_file, "JSON problem file");
  add_config_flags(solve, solve_opts);

  CommonOpts bench_opts;
  CLI::App* bench =
      app.add_subcommand("bench", "Run the builtin suite and write history files");
  add_config_flags(bench, bench_opts);

  std::string histories_dir;
  std::vector<double> taus;
  std::string profile_out;
  CLI::App* profile = app.add_subcommand("profile", "Build performance/data profile CSV");
  profile->add_option("--histories", histories_dir, "Directory of history .jsonl files")
      ->required();
  profile->add_option("--tau", taus, "Accuracy level (repeatable); default 1e-1 1e-3 1e-5");
  profile->add_option("--out", profile_out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_opts);
    if (bench->parsed()) return cmd_bench(bench_opts, bench->count("--linear-mode") > 0);
    if (profile->parsed()) return cmd_profile(histories_dir, taus, profile_out);
  } catch (const logds::LoadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  return kExitUsage;
}
