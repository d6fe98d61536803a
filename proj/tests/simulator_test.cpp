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

#include <random>

#include "oracle.hpp"

namespace gnsstopo {
namespace {

Scenario test_scenario() { return load_scenario(GNSSTOPO_DATA_DIR "/test_scenario.json"); }

std::vector<Node> chain_nodes() {
  return {{"n", NodeKind::satellite, ""}, {"a", NodeKind::satellite, ""}, {"g", NodeKind::gs_antenna, "G"}};
}

ScenarioState chain(int slots) {
  BinaryMatrix v(3);
  v.set_symmetric(0, 1, 1);
  v.set_symmetric(1, 2, 1);
  return ScenarioState(1, slots, chain_nodes(), v);
}

// Delays of the first repetition's packets of `source`, per generation slot.
std::vector<int> first_rep_delays(const EvaluationReport& r, NodeIndex source, int slots) {
  std::vector<int> d(slots, -1);
  for (const auto& p : r.packets)
    if (p.source == source && p.generated_slot < slots) d[p.generated_slot] = p.censored() ? -1 : p.delay();
  return d;
}

TEST(Simulator, AccessPatternDelaysPlusRelayHop) {
  const ScenarioState s = chain(6);
  const std::vector<int> psi{0, 1, 0, 0, 0, 1};
  TopologySchedule x(3, 6);
  for (int t = 0; t < 6; ++t) psi[t] ? x.link(0, 1, t) : x.link(1, 2, t);
  std::vector<std::vector<Packets>> rows{{1, 1, 1, 1, 1, 1}, {0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}};
  SystemParams p;
  p.c_ss = p.c_sg = 100;
  EvaluationReport r = simulate(s, x, TrafficProfile(s, rows), p, {2, false});
  // Access delays 1 0 3 2 1 0 plus one slot for the anchor's next ground slot.
  EXPECT_EQ(first_rep_delays(r, 0, 6), (std::vector<int>{2, 1, 4, 3, 2, 1}));
  EXPECT_EQ(zero_run_delay(psi), (std::vector<int>{1, 0, 3, 2, 1, 0}));
}

TEST(Simulator, ZeroTraffic) {
  Scenario sc = test_scenario();
  sc.traffic = {0, 0, {}, {}};
  const auto& s = sc.states[0];
  auto x = schedule_state_hmwm(s, sc.traffic_for(s), sc.params).schedule;
  EvaluationReport r = simulate(s, x, sc.traffic_for(s), sc.params);
  EXPECT_EQ(r.generated, 0);
  EXPECT_TRUE(r.packets.empty());
  EXPECT_EQ(r.average_delay_slots, 0);
  EXPECT_TRUE(r.cdf().empty());
}

TEST(Simulator, OldestFirstUnderUnitCapacity) {
  std::vector<Node> nodes{{"a", NodeKind::satellite, ""}, {"g", NodeKind::gs_antenna, "G"}};
  BinaryMatrix v(2);
  v.set_symmetric(0, 1, 1);
  ScenarioState s(1, 2, nodes, v);
  TopologySchedule x(2, 2);
  x.link(0, 1, 0);
  x.link(0, 1, 1);
  SystemParams p;
  p.c_sg = 1;
  EvaluationReport r = simulate(s, x, TrafficProfile(s, {{2, 0}, {0, 0}}), p);
  std::vector<int> delays;
  for (const auto& rec : r.packets)
    for (Packets k = 0; k < rec.count; ++k) delays.push_back(rec.delay());
  EXPECT_EQ(delays, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(r.average_delay_slots, 0.5);
}

TEST(Simulator, CensoredPacketsAndHorizonPenalty) {
  const ScenarioState s = chain(2);
  TopologySchedule x(3, 2);  // no links at all
  std::vector<std::vector<Packets>> rows{{1, 1}, {0, 0}, {0, 0}};
  EvaluationReport r = simulate(s, x, TrafficProfile(s, rows), SystemParams{});
  EXPECT_EQ(r.undelivered, 2);
  EXPECT_EQ(r.averaged, 0);
  EXPECT_EQ(r.average_delay_slots, 0);
  EvaluationReport pen = simulate(s, x, TrafficProfile(s, rows), SystemParams{}, {1, true});
  EXPECT_EQ(pen.averaged, 2);
  EXPECT_DOUBLE_EQ(pen.average_delay_slots, (2.0 + 1.0) / 2);
  EXPECT_TRUE(pen.delay_histogram.empty());
}

TEST(Simulator, RepetitionsScalePacketCount) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  const auto f = sc.traffic_for(s);
  auto x = schedule_state_hmwm(s, f, sc.params).schedule;
  EXPECT_EQ(simulate(s, x, f, sc.params, {5, false}).generated, 5 * simulate(s, x, f, sc.params).generated);
  EXPECT_THROW(simulate(s, x, f, sc.params, {0, false}), std::invalid_argument);
}

TEST(Simulator, RejectsInvalidSchedule) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  TopologySchedule x(8, 6);
  x.link(0, 3, 0);  // not visible
  EXPECT_THROW(simulate(s, x, sc.traffic_for(s), sc.params), ValidationError);
}

TopologySchedule random_schedule(const ScenarioState& s, std::mt19937_64& rng) {
  auto ms = testing::all_matchings(s);
  TopologySchedule x(s.node_count(), s.slot_count());
  for (int t = 0; t < s.slot_count(); ++t)
    for (const Edge& e : ms[rng() % ms.size()]) x.link(e.u, e.v, t);
  return x;
}

// Per-packet delays indexed by (source, generation, rank); censored is large.
std::vector<int> unit_delays(const EvaluationReport& r) {
  std::vector<std::tuple<NodeIndex, int, int>> v;
  for (const auto& p : r.packets)
    for (Packets k = 0; k < p.count; ++k) v.emplace_back(p.source, p.generated_slot, p.censored() ? 1 << 20 : p.delay());
  std::sort(v.begin(), v.end());
  std::vector<int> out;
  for (auto& [a, b, d] : v) out.push_back(d);
  return out;
}

TEST(Simulator, InvariantsOnRandomSchedules) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Scenario sc = testing::tiny_instance(seed);
    sc.params.b_max = 1000;
    const auto& s = sc.states[0];
    std::vector<std::vector<Packets>> rows(s.node_count(), std::vector<Packets>(s.slot_count(), 0));
    for (NodeIndex i : s.satellites())
      for (auto& c : rows[i]) c = static_cast<Packets>(rng() % 4);
    const TrafficProfile f(s, rows);
    const auto x = random_schedule(s, rng);
    const EvaluationReport r = simulate(s, x, f, sc.params, {3, false});
    EXPECT_TRUE(r.conserved());
    ASSERT_EQ(r.ledger.size(), 3u * s.slot_count());
    EXPECT_EQ(r.generated, 3 * f.total());

    // FIFO per source: later packets never overtake earlier ones.
    std::map<NodeIndex, int> last_delivery;
    for (const auto& p : r.packets) {
      if (p.censored()) continue;
      EXPECT_GE(p.delivered_slot, last_delivery[p.source]);
      last_delivery[p.source] = p.delivered_slot;
    }

    // More ground capacity never delays any packet. Extra ISL capacity can:
    // it may push packets into an anchor that never reaches the ground.
    SystemParams more = sc.params;
    more.c_sg += 1 + static_cast<Packets>(rng() % 3);
    const auto base = unit_delays(r), fast = unit_delays(simulate(s, x, f, more, {3, false}));
    ASSERT_EQ(base.size(), fast.size());
    for (std::size_t k = 0; k < base.size(); ++k) EXPECT_LE(fast[k], base[k]) << "seed " << seed;

    // The CDF ends at the delivered fraction.
    auto cdf = r.cdf();
    for (std::size_t k = 1; k < cdf.size(); ++k) EXPECT_LE(cdf[k - 1].second, cdf[k].second);
    if (!cdf.empty())
      EXPECT_DOUBLE_EQ(cdf.back().second, static_cast<double>(r.delivered) / static_cast<double>(r.generated));
  }
}

TEST(Simulator, ExtraIslCapacityCanStrandPackets) {
  // s1 (non-anchor) sees anchors s2 and s3; only s3 ever links to the ground.
  std::vector<Node> nodes{{"s1", NodeKind::satellite, ""},
                          {"s2", NodeKind::satellite, ""},
                          {"s3", NodeKind::satellite, ""},
                          {"g", NodeKind::gs_antenna, "G"}};
  BinaryMatrix v(4);
  v.set_symmetric(0, 1, 1);
  v.set_symmetric(0, 2, 1);
  v.set_symmetric(1, 3, 1);
  v.set_symmetric(2, 3, 1);
  ScenarioState s(1, 3, nodes, v);
  TopologySchedule x(4, 3);
  x.link(0, 1, 0);
  x.link(0, 2, 1);
  x.link(2, 3, 2);
  const TrafficProfile f(s, {{4, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  SystemParams p;
  p.c_ss = 2;
  EXPECT_EQ(simulate(s, x, f, p).delivered, 2);
  p.c_ss = 4;
  EXPECT_EQ(simulate(s, x, f, p).delivered, 0);
}

TEST(Simulator, AgeSumEqualsExactObjective) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Scenario sc = testing::tiny_instance(seed);
    const auto& s = sc.states[0];
    const auto f = sc.traffic_for(s);
    IlpModel m = build_ilp(s, f, sc.params);
    IlpSolution sol = solve_branch_and_bound(m, 60.0);
    if (sol.status != SolveStatus::optimal) continue;
    EvaluationReport r = simulate(s, extract_topology(m, sol, s), f, sc.params);
    EXPECT_EQ(static_cast<double>(r.age_weighted_buffer), sol.objective_value) << "seed " << seed;
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(Merge, PacketWeightedAverageAndCdf) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  const auto f = sc.traffic_for(s);
  auto a = simulate(s, schedule_state_hmwm(s, f, sc.params).schedule, f, sc.params);
  auto b = simulate(s, schedule_state_fcp(s, 1).schedule, f, sc.params, {2, false});
  auto m = merge_reports({a, b});
  EXPECT_EQ(m.generated, a.generated + b.generated);
  double sum = 0;
  Packets n = 0;
  for (const auto* r : {&a, &b})
    for (const auto& p : r->packets)
      if (!p.censored()) {
        sum += p.delay() * static_cast<double>(p.count);
        n += p.count;
      }
  EXPECT_NEAR(m.average_delay_slots, sum / static_cast<double>(n), 1e-12);
  std::map<int, Packets> hist;
  for (const auto* r : {&a, &b})
    for (const auto& p : r->packets)
      if (!p.censored()) hist[p.delay()] += p.count;
  EXPECT_EQ(m.delay_histogram, hist);
  EXPECT_TRUE(merge_reports({}).packets.empty());
}

TEST(ReportIo, ScheduleRoundTrip) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  ScheduleFile f{sc.name, 1, "hmwm", "feasible", 12.5, 3.0, schedule_state_hmwm(s, sc.traffic_for(s), sc.params).schedule};
  ScheduleFile g = schedule_from_json(schedule_to_json(f, s), s);
  EXPECT_EQ(g.schedule, f.schedule);
  EXPECT_EQ(g.objective, 12.5);
  EXPECT_EQ(g.algorithm, "hmwm");
  auto j = schedule_to_json(f, s);
  j["slots"] = 5;
  EXPECT_THROW(schedule_from_json(j, s), ParseError);
  j = schedule_to_json(f, s);
  j["links"][0][0][0] = "nope";
  EXPECT_THROW(schedule_from_json(j, s), ParseError);
}

TEST(ReportIo, ReportAndComparisonFormats) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  const auto f = sc.traffic_for(s);
  auto r = simulate(s, schedule_state_hmwm(s, f, sc.params).schedule, f, sc.params);
  r.scenario = sc.name;
  r.algorithm = "hmwm";
  auto back = report_from_json(report_to_json(r));
  EXPECT_EQ(back.delay_histogram, r.delay_histogram);
  EXPECT_EQ(back.cdf(), r.cdf());
  EXPECT_DOUBLE_EQ(back.average_delay_slots, r.average_delay_slots);
  EXPECT_EQ(back.ranging_pass, r.ranging_pass);

  const std::string cdf = cdf_csv(r);
  EXPECT_EQ(cdf.substr(0, 21), "delay_slots,fraction\n");
  EXPECT_NE(cdf.find("0,0."), std::string::npos);

  auto other = r;
  other.algorithm = "fcp";
  Comparison one = compare({r});
  EXPECT_FALSE(one.scenario_mismatch);
  const std::string table = comparison_csv(one);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 2);
  other.scenario = "elsewhere";
  Comparison two = compare({r, other});
  EXPECT_TRUE(two.scenario_mismatch);
  EXPECT_TRUE(comparison_json(two)["scenario_mismatch"].get<bool>());
  EXPECT_THROW(compare({}), std::invalid_argument);
  EXPECT_EQ(fixed(1.0 / 3), "0.333333");
}

}  // namespace
}  // namespace gnsstopo
