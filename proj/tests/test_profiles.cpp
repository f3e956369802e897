#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "logds/profiles.hpp"

using namespace logds;

namespace {

RunHistory make_history(std::string problem, std::string solver, int n,
                        std::initializer_list<std::pair<double, double>> fv) {
  RunHistory h;
  h.problem = std::move(problem);
  h.solver = std::move(solver);
  h.n = n;
  int idx = 1;
  for (auto [f, viol] : fv) h.entries.push_back({idx++, f, viol});
  return h;
}

// Brute-force profile oracle: double loop over problems/solvers, counting by
// direct comparison. Kept independent of the production step functions.
double oracle_perf_value(const ProfileTable& table, std::size_t s, double alpha) {
  int count = 0;
  for (std::size_t p = 0; p < table.problems.size(); ++p) {
    double best = kInf;
    for (std::size_t s2 = 0; s2 < table.solvers.size(); ++s2)
      if (table.t[p][s2] < best) best = table.t[p][s2];
    if (!std::isfinite(table.t[p][s]) || !std::isfinite(best)) continue;
    if (table.t[p][s] / best <= alpha) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(table.problems.size());
}

double oracle_data_value(const ProfileTable& table, std::size_t s, double kappa) {
  int count = 0;
  for (std::size_t p = 0; p < table.problems.size(); ++p) {
    if (!std::isfinite(table.t[p][s])) continue;
    // compare in kappa-space so the breakpoint itself counts exactly
    if (table.t[p][s] / (table.n_p[p] + 1) <= kappa) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(table.problems.size());
}

}  // namespace

TEST_CASE("violation propagates infinities") {
  Vector g(2), h(1);
  g << 0.5, -1.0;
  h << 0.2;
  CHECK(violation(g, h) == doctest::Approx(0.7));
  g << kInf, -1.0;
  CHECK(violation(g, h) == kInf);
}

TEST_CASE("convergence test") {
  SUBCASE("boundary case passes with equality") {
    auto h = make_history("p", "s", 2, {{5.0, 0.0}});
    // pad so the passing entry has eval_index 37
    h.entries.clear();
    for (int i = 1; i <= 40; ++i) h.entries.push_back({i, i == 37 ? 1.0 : 5.0, 0.0});
    CHECK(convergence_eval_count(h, 10.0, 0.0, 0.1) == 37.0);
  }
  SUBCASE("never passing yields infinity") {
    auto h = make_history("p", "s", 2, {{1.5, 0.0}, {1.5, 0.0}});
    CHECK(convergence_eval_count(h, 10.0, 0.0, 0.1) == kInf);
  }
  SUBCASE("reaching f_L passes for any tau") {
    for (double tau : {1e-1, 1e-3, 1e-5}) {
      auto h = make_history("p", "s", 2, {{0.0, 0.0}});
      CHECK(convergence_eval_count(h, 10.0, 0.0, tau) == 1.0);
    }
  }
  SUBCASE("infeasible entries are treated as +inf objective") {
    auto h = make_history("p", "s", 2, {{-100.0, 1.0}, {1.0, 0.0}});
    CHECK(convergence_eval_count(h, 10.0, 0.0, 0.1) == 2.0);
  }
  SUBCASE("monotone in tau: tighter accuracy never converges earlier") {
    std::mt19937 rng(2468);
    std::uniform_real_distribution<double> fdist(0.0, 10.0);
    std::uniform_real_distribution<double> vdist(0.0, 2e-4);
    for (int trial = 0; trial < 100; ++trial) {
      RunHistory h;
      h.problem = "p";
      h.solver = "s";
      h.n = 3;
      for (int i = 1; i <= 30; ++i) h.entries.push_back({i, fdist(rng), vdist(rng)});
      double prev = -1.0;
      for (double tau : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        double t = convergence_eval_count(h, 10.0, 0.0, tau);
        if (prev >= 0.0) CHECK(t >= prev);
        prev = t;
      }
    }
  }
  SUBCASE("precondition: finite f_M >= f_L") {
    auto h = make_history("p", "s", 2, {{1.0, 0.0}});
    CHECK_THROWS_AS(convergence_eval_count(h, 0.0, 1.0, 0.1), std::invalid_argument);
  }
}

TEST_CASE("table construction") {
  SUBCASE("f_L and f_M span all solvers' feasible points") {
    std::vector<RunHistory> hs = {
        make_history("p1", "s1", 2, {{5.0, 0.0}, {1.0, 0.0}}),
        make_history("p1", "s2", 2, {{3.0, 0.0}}),
    };
    auto table = build_table(hs, 0.1);
    REQUIRE(table.problems == std::vector<std::string>{"p1"});
    // f_L = 1, f_M = 5; s1 passes at eval 2 (10% of gap), s2: 5-3=2 >= 0.9*4? no -> inf
    CHECK(table.t[0][0] == 2.0);
    CHECK(table.t[0][1] == kInf);
  }
  SUBCASE("solver with no feasible point gets t = inf") {
    std::vector<RunHistory> hs = {
        make_history("p1", "s1", 2, {{1.0, 0.0}}),
        make_history("p1", "s2", 2, {{-5.0, 3.0}}),
    };
    auto table = build_table(hs, 0.1);
    CHECK(std::isfinite(table.t[0][0]));
    CHECK(table.t[0][1] == kInf);
  }
  SUBCASE("problems with no feasible point anywhere are dropped with a warning") {
    std::vector<RunHistory> hs = {
        make_history("p1", "s1", 2, {{1.0, 0.0}}),
        make_history("p2", "s1", 2, {{1.0, 9.0}}),
    };
    std::vector<std::string> warnings;
    auto table = build_table(hs, 0.1, 1e-4, &warnings);
    CHECK(table.problems == std::vector<std::string>{"p1"});
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("p2") != std::string::npos);
  }
  SUBCASE("duplicate (problem, solver) is an error") {
    std::vector<RunHistory> hs = {
        make_history("p1", "s1", 2, {{1.0, 0.0}}),
        make_history("p1", "s1", 2, {{2.0, 0.0}}),
    };
    CHECK_THROWS_AS(build_table(hs, 0.1), std::invalid_argument);
  }
  SUBCASE("degenerate f_M == f_L passes at the first feasible entry") {
    std::vector<RunHistory> hs = {
        make_history("p1", "s1", 2, {{7.0, 9.0}, {4.0, 0.0}}),
    };
    auto table = build_table(hs, 0.1);
    CHECK(table.t[0][0] == 2.0);
  }
}

TEST_CASE("profile examples") {
  ProfileTable table;
  table.problems = {"p1", "p2"};
  table.solvers = {"s1", "s2"};
  table.t = {{2.0, 4.0}, {3.0, 3.0}};
  table.n_p = {2, 2};
  table.tau = 0.1;

  SUBCASE("performance ratios") {
    auto profiles = performance_profile(table);
    REQUIRE(profiles.size() == 2);
    // s1 ratios {1,1}: single breakpoint 1 with value 1
    REQUIRE(profiles[0].breakpoints == std::vector<double>{1.0});
    CHECK(profiles[0].values == std::vector<double>{1.0});
    // s2 ratios {2,1}: value 0.5 at 1, 1.0 at 2
    REQUIRE(profiles[1].breakpoints == std::vector<double>{1.0, 2.0});
    CHECK(profiles[1].values == std::vector<double>{0.5, 1.0});
  }
  SUBCASE("single solver efficiency equals its solve rate") {
    ProfileTable single;
    single.problems = {"p1", "p2", "p3"};
    single.solvers = {"s"};
    single.t = {{2.0}, {kInf}, {7.0}};
    single.n_p = {1, 1, 1};
    auto profiles = performance_profile(single);
    REQUIRE(profiles[0].breakpoints == std::vector<double>{1.0});
    CHECK(profiles[0].values[0] == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("all-infinite solver never appears") {
    ProfileTable t2 = table;
    t2.t = {{kInf, 2.0}, {kInf, 3.0}};
    auto profiles = performance_profile(t2);
    CHECK(profiles[0].breakpoints.empty());
    CHECK(profiles[1].values.back() == 1.0);
  }
  SUBCASE("data profile thresholds") {
    ProfileTable t3;
    t3.problems = {"p"};
    t3.solvers = {"s"};
    t3.t = {{30.0}};
    t3.n_p = {2};
    auto profiles = data_profile(t3);
    REQUIRE(profiles[0].breakpoints == std::vector<double>{10.0});  // 30 <= k*3
    CHECK(profiles[0].values == std::vector<double>{1.0});

    t3.t = {{1.0}};
    t3.n_p = {1};
    profiles = data_profile(t3);
    REQUIRE(profiles[0].breakpoints == std::vector<double>{0.5});
  }
}

TEST_CASE("profiles match the brute-force oracle on 100 random tables") {
  std::mt19937 rng(13579);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> tdist(1, 50);
  std::uniform_int_distribution<int> ndist(1, 8);

  for (int trial = 0; trial < 100; ++trial) {
    ProfileTable table;
    const int P = 10, S = 3;
    for (int p = 0; p < P; ++p) table.problems.push_back("p" + std::to_string(p));
    for (int s = 0; s < S; ++s) table.solvers.push_back("s" + std::to_string(s));
    table.n_p.resize(P);
    table.t.assign(P, std::vector<double>(S));
    for (int p = 0; p < P; ++p) {
      table.n_p[p] = ndist(rng);
      for (int s = 0; s < S; ++s)
        table.t[p][s] = (u(rng) < 0.25) ? kInf : static_cast<double>(tdist(rng));
    }

    auto perf = performance_profile(table);
    for (int s = 0; s < S; ++s) {
      double prev_val = 0.0;
      double prev_bp = -kInf;
      for (std::size_t i = 0; i < perf[s].breakpoints.size(); ++i) {
        double bp = perf[s].breakpoints[i];
        double val = perf[s].values[i];
        CHECK(bp > prev_bp);           // strictly increasing breakpoints
        CHECK(val >= prev_val);         // nondecreasing step values
        CHECK(val >= 0.0);
        CHECK(val <= 1.0);
        CHECK(val == oracle_perf_value(table, s, bp));  // bitwise agreement
        // just below the breakpoint the oracle must give the previous value
        if (i > 0) CHECK(oracle_perf_value(table, s, std::nextafter(bp, -kInf)) == prev_val);
        prev_val = val;
        prev_bp = bp;
      }
    }
    auto data = data_profile(table);
    for (int s = 0; s < S; ++s) {
      double prev_val = 0.0;
      for (std::size_t i = 0; i < data[s].breakpoints.size(); ++i) {
        double bp = data[s].breakpoints[i];
        double val = data[s].values[i];
        CHECK(val == oracle_data_value(table, s, bp));
        if (i > 0) CHECK(oracle_data_value(table, s, std::nextafter(bp, -kInf)) == prev_val);
        prev_val = val;
      }
    }

    // every solved problem gives its per-problem minimizer ratio exactly 1,
    // so by pigeonhole some solver collects at least solved/(S*P) at alpha=1
    int solved = 0;
    for (int p = 0; p < P; ++p) {
      bool any = false;
      for (int s = 0; s < S; ++s) any |= std::isfinite(table.t[p][s]);
      solved += any ? 1 : 0;
    }
    if (solved > 0) {
      double best_at_one = 0.0;
      for (int s = 0; s < S; ++s)
        best_at_one = std::max(best_at_one, oracle_perf_value(table, s, 1.0));
      CHECK(best_at_one >= static_cast<double>(solved) / (S * P) - 1e-15);
    }
  }
}

TEST_CASE("history JSONL round trip") {
  RunHistory h = make_history("prob", "solv", 4, {{1.5, 0.0}, {kInf, 0.5}});
  std::ostringstream out;
  write_history_jsonl(out, h);
  std::istringstream in(out.str());
  auto parsed = parse_history_jsonl(in, "mem");
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].problem == "prob");
  CHECK(parsed[0].solver == "solv");
  CHECK(parsed[0].n == 4);
  REQUIRE(parsed[0].entries.size() == 2);
  CHECK(parsed[0].entries[0].f == 1.5);
  CHECK(std::isnan(parsed[0].entries[1].f));  // inf serialized as null -> NaN
}

TEST_CASE("malformed history lines report the line number") {
  std::istringstream in("{\"problem\":\"p\",\"solver\":\"s\",\"eval_index\":1,\"f\":1.0,\"violation\":0.0}\nnot json\n");
  CHECK_THROWS_WITH_AS(parse_history_jsonl(in, "file.jsonl"), doctest::Contains("file.jsonl:2"),
                       std::runtime_error);
}

TEST_CASE("eval_index must increase strictly") {
  std::istringstream in(
      "{\"problem\":\"p\",\"solver\":\"s\",\"eval_index\":2,\"f\":1.0,\"violation\":0.0}\n"
      "{\"problem\":\"p\",\"solver\":\"s\",\"eval_index\":2,\"f\":1.0,\"violation\":0.0}\n");
  CHECK_THROWS_AS(parse_history_jsonl(in, "m"), std::runtime_error);
}

TEST_CASE("CSV emission shape") {
  ProfileTable table;
  table.problems = {"p1"};
  table.solvers = {"a"};
  table.t = {{3.0}};
  table.n_p = {2};
  table.tau = 1e-3;
  std::ostringstream out;
  write_profiles_csv(out, {table});
  std::string csv = out.str();
  CHECK(csv.rfind("solver,breakpoint,value,kind,tau\n", 0) == 0);
  CHECK(csv.find("a,1,1,perf,0.001") != std::string::npos);
  CHECK(csv.find(",data,") != std::string::npos);
}
