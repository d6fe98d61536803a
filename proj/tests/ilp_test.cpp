// Copyright 2026 The gnsstopo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracle.hpp"

namespace gnsstopo {
namespace {

Scenario test_scenario() { return load_scenario(GNSSTOPO_DATA_DIR "/test_scenario.json"); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Counts derived by hand from the test scenario's 14 edges (3 touch the
// ground antenna), anchors {v5,v6,v7} and 7 sources each emitting every slot.
TEST(IlpModel, TestScenarioCounts) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  IlpModel m = build_ilp(s, sc.traffic_for(s), sc.params);
  EXPECT_EQ(m.count_prefix("x"), 14u * 6u);
  EXPECT_EQ(m.count_prefix("l"), 11u);
  // Arcs: 6 n->a, 3 a->g, 6 directed n->n, 4 directed a->a. Flow-slots: 7*21.
  EXPECT_EQ(m.count_prefix("r"), 19u * 147u);
  EXPECT_EQ(m.count_prefix("b"), 7u * 147u);
  EXPECT_EQ(m.variables().size(), 84u + 11u + 2793u + 1029u);
  EXPECT_EQ(m.count(VarKind::binary), 95u);
  // deg 8*6, ranging 2*11, lmin 7, flow 147*7, buf 7*6, per-arc 2*19*6.
  EXPECT_EQ(m.constraints().size(), 48u + 22u + 7u + 1029u + 42u + 228u);
  EXPECT_TRUE(m.find("x_1_2_1"));
  EXPECT_TRUE(m.find("l_3_7"));
  EXPECT_TRUE(m.find("r_1_1_5_1"));
  EXPECT_FALSE(m.find("x_2_1_1"));
  EXPECT_EQ(m.sense(), ObjectiveSense::minimize);
}

TEST(IlpModel, RejectsUnsafeBigM) {
  Scenario sc = test_scenario();
  SystemParams p = sc.params;
  p.m_big = 50;
  EXPECT_THROW(build_ilp(sc.states[0], sc.traffic_for(sc.states[0]), p), ValidationError);
}

TEST(IlpModel, ZeroTrafficHasNoRouting) {
  Scenario sc = test_scenario();
  sc.traffic = {0, 0, {}, {}};
  IlpModel m = build_ilp(sc.states[0], sc.traffic_for(sc.states[0]), sc.params);
  EXPECT_EQ(m.count_prefix("r"), 0u);
  EXPECT_EQ(m.count_prefix("b"), 0u);
  IlpSolution sol = solve_branch_and_bound(m, 60.0);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_EQ(sol.objective_value, 0);
  EXPECT_TRUE(ranging_audit(extract_topology(m, sol, sc.states[0]), sc.states[0], sc.params.l_min).pass);
}

TEST(LpExport, MatchesFrozenGoldenFile) {
  Scenario sc = test_scenario();
  const auto s = sc.states[0].with_slot_count(3);
  IlpModel m = build_ilp(s, sc.traffic_for(s), sc.params);
  std::ostringstream out;
  write_lp(out, m);
  EXPECT_EQ(out.str(), slurp(GNSSTOPO_TEST_DIR "/golden/test_scenario_t3.lp"));
  IlpSolution sol = solve_branch_and_bound(m, 60.0);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_EQ(sol.objective_value, 72);  // HiGHS optimum of the frozen file
}

TEST(LpExport, Layout) {
  Scenario sc = test_scenario();
  const auto s = sc.states[0].with_slot_count(3);
  IlpModel m = build_railp(s, sc.traffic_for(s), sc.params);
  std::ostringstream out;
  write_lp(out, m);
  const std::string lp = out.str();
  auto at = [&](const char* k) { return lp.find(k); };
  ASSERT_NE(at("Maximize\n"), std::string::npos);
  EXPECT_LT(at("Maximize\n"), at("Subject To\n"));
  EXPECT_LT(at("Subject To\n"), at("Bounds\n"));
  EXPECT_LT(at("Bounds\n"), at("Binary\n"));
  EXPECT_EQ(at("General\n"), std::string::npos);  // no integer variables
  EXPECT_EQ(lp.substr(lp.size() - 4), "End\n");
  std::istringstream lines(lp);
  for (std::string line; std::getline(lines, line);) EXPECT_LT(line.size(), 560u);
}

TEST(LpExport, AtomicFileWrite) {
  Scenario sc = test_scenario();
  IlpModel m = build_ilp(sc.states[0].with_slot_count(2), sc.traffic_for(sc.states[0].with_slot_count(2)), sc.params);
  auto dir = std::filesystem::temp_directory_path() / "gnsstopo_lp_test";
  std::filesystem::create_directories(dir);
  export_lp(m, dir / "m.lp");
  EXPECT_TRUE(std::filesystem::exists(dir / "m.lp"));
  EXPECT_FALSE(std::filesystem::exists(dir / "m.lp.tmp"));
  std::ostringstream out;
  write_lp(out, m);
  EXPECT_EQ(slurp(dir / "m.lp"), out.str());
  std::filesystem::remove_all(dir);
}

TEST(SolutionImport, RoundTripsAnAssignment) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  IlpModel m = build_ilp(s, sc.traffic_for(s), sc.params);
  auto x = schedule_state_hmwm(s, sc.traffic_for(s), sc.params).schedule;
  auto values = ilp_assignment(m, x);
  std::ostringstream file;
  file << "# exported by a solver\n\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i]) file << m.variables()[i].name << ' ' << values[i] << ".0000000001\n";
  std::istringstream in(file.str());
  EXPECT_EQ(read_solution(in, m), values);
}

TEST(SolutionImport, RejectsBadLines) {
  Scenario sc = test_scenario();
  IlpModel m = build_ilp(sc.states[0], sc.traffic_for(sc.states[0]), sc.params);
  std::istringstream unknown("x_9_9_1 1\n"), frac("x_1_2_1 0.5\n"), missing("x_1_2_1\n");
  EXPECT_THROW(read_solution(unknown, m), std::runtime_error);
  EXPECT_THROW(read_solution(frac, m), std::runtime_error);
  EXPECT_THROW(read_solution(missing, m), std::runtime_error);
}

TEST(Assignment, HeuristicScheduleIsAModelPoint) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  const auto f = sc.traffic_for(s);
  IlpModel m = build_ilp(s, f, sc.params);
  auto x = schedule_state_hmwm(s, f, sc.params).schedule;
  auto values = ilp_assignment(m, x);
  EXPECT_TRUE(check_assignment(m, values).empty());
  EXPECT_EQ(m.evaluate_objective(values), static_cast<double>(simulate(s, x, f, sc.params).age_weighted_buffer));
  IlpModel r = build_railp(s, f, sc.params);
  auto rv = railp_assignment(r, x);
  EXPECT_TRUE(check_assignment(r, rv).empty());
  EXPECT_DOUBLE_EQ(r.evaluate_objective(rv), railp_objective(x, s, f, sc.params.gamma));
}

TEST(Assignment, CheckerFlagsViolations) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  IlpModel m = build_ilp(s, sc.traffic_for(s), sc.params);
  auto values = ilp_assignment(m, TopologySchedule(8, 6));
  auto bad = check_assignment(m, values);
  EXPECT_FALSE(bad.empty());  // no links, so every lmin row fails
  EXPECT_NE(std::find(bad.begin(), bad.end(), "lmin_1"), bad.end());
  values[*m.find("x_1_2_1")] = 2;
  bad = check_assignment(m, values);
  EXPECT_NE(std::find(bad.begin(), bad.end(), "bound:x_1_2_1"), bad.end());
}

TEST(Extraction, ReportsNonBinaryLinks) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  IlpModel m = build_ilp(s, sc.traffic_for(s), sc.params);
  IlpSolution sol;
  sol.status = SolveStatus::feasible;
  sol.values.assign(m.variables().size(), 0);
  sol.values[*m.find("x_1_2_1")] = 2;
  EXPECT_THROW(extract_topology(m, sol, s), ValidationError);
  sol.values[*m.find("x_1_2_1")] = 1;
  sol.values[*m.find("x_1_3_1")] = 1;  // v1 twice in slot 1
  EXPECT_THROW(extract_topology(m, sol, s), ValidationError);
  sol.status = SolveStatus::infeasible;
  EXPECT_THROW(extract_topology(m, sol, s), std::runtime_error);
}

// External cross-check of both the exported models and the internal solver.
TEST(HighsCrossCheck, ExportedModelsAgreeWithInternalSolver) {
  auto dir = std::filesystem::temp_directory_path() / "gnsstopo_highs";
  std::filesystem::create_directories(dir);
  std::vector<std::pair<std::filesystem::path, IlpSolution>> cases;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Scenario sc = testing::tiny_instance(seed);
    const auto& s = sc.states[0];
    for (bool ilp : {true, false}) {
      IlpModel m = ilp ? build_ilp(s, sc.traffic_for(s), sc.params) : build_railp(s, sc.traffic_for(s), sc.params);
      auto p = dir / ((ilp ? "ilp_" : "railp_") + std::to_string(seed) + ".lp");
      export_lp(m, p);
      cases.emplace_back(p, solve_branch_and_bound(m, 60.0));
    }
  }
  Scenario sc = test_scenario();
  const auto s4 = sc.states[0].with_slot_count(4);
  IlpModel big = build_ilp(s4, sc.traffic_for(s4), sc.params);
  export_lp(big, dir / "test_t4.lp");
  cases.emplace_back(dir / "test_t4.lp", solve_branch_and_bound(big, 120.0));

  std::string cmd = "python3 " GNSSTOPO_TEST_DIR "/highs_solve.py";
  for (auto& [p, sol] : cases) cmd += " " + p.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::map<std::string, std::pair<std::string, double>> got;
  char buf[1024];
  while (std::fgets(buf, sizeof buf, pipe)) {
    std::istringstream ls(buf);
    std::string path, status, obj;
    ls >> path >> status >> obj;
    got[path] = {status, std::stod(obj)};
  }
  const int rc = pclose(pipe);
  std::filesystem::remove_all(dir);
  if (WIFEXITED(rc) && WEXITSTATUS(rc) == 77) GTEST_SKIP() << "highspy not available";
  ASSERT_EQ(got.size(), cases.size());
  for (auto& [p, sol] : cases) {
    auto [status, obj] = got.at(p.string());
    if (sol.status == SolveStatus::infeasible) {
      EXPECT_EQ(status, "infeasible") << p;
    } else {
      ASSERT_EQ(sol.status, SolveStatus::optimal) << p;
      ASSERT_EQ(status, "optimal") << p;
      EXPECT_NEAR(obj, sol.objective_value, 1e-6) << p;
    }
  }
}

}  // namespace
}  // namespace gnsstopo
