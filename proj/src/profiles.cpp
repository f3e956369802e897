#include "logds/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <stdexcept>

namespace logds {

using json = nlohmann::json;

double convergence_eval_count(const RunHistory& history, double f_M, double f_L, double tau,
                              double feas_tol) {
  if (!std::isfinite(f_M) || !std::isfinite(f_L) || f_M < f_L)
    throw std::invalid_argument("convergence_eval_count: need finite f_M >= f_L");
  const double required = (1.0 - tau) * (f_M - f_L);
  for (const HistoryEntry& e : history.entries) {
    const bool feasible = std::isfinite(e.violation) && e.violation <= feas_tol;
    const double f_eff = (feasible && std::isfinite(e.f)) ? e.f : kInf;
    if (f_M - f_eff >= required) return e.eval_index;
  }
  return kInf;
}

ProfileTable build_table(const std::vector<RunHistory>& histories, double tau, double feas_tol,
                         std::vector<std::string>* warnings) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const RunHistory& h : histories)
    if (!seen.insert({h.problem, h.solver}).second)
      throw std::invalid_argument("duplicate (problem, solver) pair: " + h.problem + ", " +
                                  h.solver);

  std::set<std::string> problem_names, solver_names;
  for (const RunHistory& h : histories) {
    problem_names.insert(h.problem);
    solver_names.insert(h.solver);
  }

  ProfileTable table;
  table.tau = tau;
  table.solvers.assign(solver_names.begin(), solver_names.end());

  for (const std::string& p : problem_names) {
    double f_L = kInf, f_M = -kInf;
    int n_p = 0;
    for (const RunHistory& h : histories) {
      if (h.problem != p) continue;
      n_p = std::max(n_p, h.n);
      for (const HistoryEntry& e : h.entries) {
        if (!std::isfinite(e.f) || !std::isfinite(e.violation) || e.violation > feas_tol)
          continue;
        f_L = std::min(f_L, e.f);
        f_M = std::max(f_M, e.f);
      }
    }
    if (!std::isfinite(f_L)) {
      if (warnings)
        warnings->push_back("problem '" + p + "' dropped: no solver found a feasible point");
      continue;
    }
    table.problems.push_back(p);
    table.n_p.push_back(n_p);
    std::vector<double> row(table.solvers.size(), kInf);
    for (const RunHistory& h : histories) {
      if (h.problem != p) continue;
      auto it = std::find(table.solvers.begin(), table.solvers.end(), h.solver);
      row[static_cast<std::size_t>(it - table.solvers.begin())] =
          convergence_eval_count(h, f_M, f_L, tau, feas_tol);
    }
    table.t.push_back(std::move(row));
  }
  return table;
}

namespace {

StepFunction cumulate(std::vector<double> marks, std::size_t total) {
  std::sort(marks.begin(), marks.end());
  StepFunction fn;
  std::size_t i = 0;
  while (i < marks.size()) {
    std::size_t j = i;
    while (j < marks.size() && marks[j] == marks[i]) ++j;
    fn.breakpoints.push_back(marks[i]);
    fn.values.push_back(static_cast<double>(j) / static_cast<double>(total));
    i = j;
  }
  return fn;
}

}  // namespace

std::vector<StepFunction> performance_profile(const ProfileTable& table) {
  const std::size_t P = table.problems.size();
  const std::size_t S = table.solvers.size();
  std::vector<StepFunction> profiles(S);
  if (P == 0) return profiles;
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<double> ratios;
    for (std::size_t p = 0; p < P; ++p) {
      double best = kInf;
      for (std::size_t s2 = 0; s2 < S; ++s2) best = std::min(best, table.t[p][s2]);
      double tps = table.t[p][s];
      if (std::isfinite(tps) && std::isfinite(best)) ratios.push_back(tps / best);
    }
    profiles[s] = cumulate(std::move(ratios), P);
  }
  return profiles;
}

std::vector<StepFunction> data_profile(const ProfileTable& table) {
  const std::size_t P = table.problems.size();
  const std::size_t S = table.solvers.size();
  std::vector<StepFunction> profiles(S);
  if (P == 0) return profiles;
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<double> kappas;
    for (std::size_t p = 0; p < P; ++p) {
      double tps = table.t[p][s];
      if (std::isfinite(tps)) kappas.push_back(tps / (table.n_p[p] + 1));
    }
    profiles[s] = cumulate(std::move(kappas), P);
  }
  return profiles;
}

namespace {

// Shortest decimal form that round-trips to the same double.
std::string fmt(double v) {
  char buf[48];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_profile_rows(std::ostream& out, const ProfileTable& table, const char* kind,
                        const std::vector<StepFunction>& profiles) {
  for (std::size_t s = 0; s < table.solvers.size(); ++s)
    for (std::size_t i = 0; i < profiles[s].breakpoints.size(); ++i)
      out << table.solvers[s] << ',' << fmt(profiles[s].breakpoints[i]) << ','
          << fmt(profiles[s].values[i]) << ',' << kind << ',' << fmt(table.tau) << '\n';
}

}  // namespace

void write_profiles_csv(std::ostream& out, const std::vector<ProfileTable>& tables) {
  out << "solver,breakpoint,value,kind,tau\n";
  for (const ProfileTable& table : tables) {
    write_profile_rows(out, table, "perf", performance_profile(table));
    write_profile_rows(out, table, "data", data_profile(table));
  }
}

void write_history_jsonl(std::ostream& out, const RunHistory& history) {
  for (const HistoryEntry& e : history.entries) {
    nlohmann::ordered_json j;
    j["problem"] = history.problem;
    j["solver"] = history.solver;
    j["eval_index"] = e.eval_index;
    j["f"] = std::isfinite(e.f) ? json(e.f) : json(nullptr);
    j["violation"] = std::isfinite(e.violation) ? json(e.violation) : json(nullptr);
    j["n"] = history.n;
    out << j.dump() << '\n';
  }
}

std::vector<RunHistory> parse_history_jsonl(std::istream& in, const std::string& origin) {
  std::map<std::pair<std::string, std::string>, RunHistory> grouped;
  std::vector<std::pair<std::string, std::string>> order;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": malformed history line: " + e.what());
    }
    try {
      std::string problem = j.at("problem").get<std::string>();
      std::string solver = j.at("solver").get<std::string>();
      HistoryEntry e;
      e.eval_index = j.at("eval_index").get<int>();
      e.f = j.at("f").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                : j.at("f").get<double>();
      e.violation = j.at("violation").is_null() ? kInf : j.at("violation").get<double>();
      auto key = std::make_pair(problem, solver);
      auto it = grouped.find(key);
      if (it == grouped.end()) {
        RunHistory h;
        h.problem = problem;
        h.solver = solver;
        it = grouped.emplace(key, std::move(h)).first;
        order.push_back(key);
      }
      if (j.contains("n") && !j["n"].is_null())
        it->second.n = std::max(it->second.n, j["n"].get<int>());
      if (!it->second.entries.empty() && e.eval_index <= it->second.entries.back().eval_index)
        throw std::runtime_error("eval_index must be strictly increasing");
      it->second.entries.push_back(e);
    } catch (const json::exception& e) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": malformed history line: " + e.what());
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::vector<RunHistory> out;
  out.reserve(order.size());
  for (const auto& key : order) out.push_back(std::move(grouped[key]));
  return out;
}

}  // namespace logds
