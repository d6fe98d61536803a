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

#include <algorithm>
#include <set>

#include "oracle.hpp"

namespace gnsstopo {
namespace {

Scenario test_scenario() { return load_scenario(GNSSTOPO_DATA_DIR "/test_scenario.json"); }

TEST(Fcp, SameSeedSameSchedule) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  EXPECT_EQ(schedule_state_fcp(s, 7).schedule, schedule_state_fcp(s, 7).schedule);
  std::set<std::vector<int>> orders;
  for (std::uint64_t seed = 0; seed < 10; ++seed) orders.insert(schedule_state_fcp(s, seed).order);
  EXPECT_GT(orders.size(), 1u);
}

TEST(Fcp, ShuffleOnlyReordersSlots) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  FcpResult r = schedule_state_fcp(s, 3);
  std::vector<int> sorted = r.order;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5}));
  for (int k = 0; k < 6; ++k) EXPECT_EQ(r.schedule.links(k), r.unshuffled.links(r.order[k]));
  EXPECT_TRUE(validate_topology(r.schedule, s).empty());
}

TEST(Fcp, SchedulesPerfectMatchings) {
  Scenario sc = test_scenario();
  const auto& s = sc.states[0];
  FcpResult r = schedule_state_fcp(s, 1);
  for (int t = 0; t < 6; ++t) EXPECT_EQ(r.schedule.links(t).size(), 4u);
}

TEST(Fcp, CountersResetWhenScheduled) {
  Scenario sc = test_scenario();
  const auto s = sc.states[0].with_slot_count(1);
  FcpResult r = schedule_state_fcp(s, 1);
  for (std::size_t k = 0; k < r.counters.edges.size(); ++k) {
    const Edge& e = r.counters.edges[k];
    EXPECT_EQ(r.counters.disabled[k], r.unshuffled.at(e.u, e.v, 0) ? 0 : 1);
  }
}

// On an even clique every edge keeps coming back.
TEST(Fcp, NoEdgeStarvesOnEvenClique) {
  for (int n : {4, 6}) {
    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({"s" + std::to_string(i), NodeKind::satellite, ""});
    BinaryMatrix v(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) v.set_symmetric(i, j, 1);
    const int T = 4 * (n - 1);
    ScenarioState s(1, T, nodes, v);
    FcpResult r = schedule_state_fcp(s, 1);
    std::vector<int> last(n * n, -1);
    int worst_gap = 0;
    for (int t = 0; t < T; ++t)
      for (const Edge& e : r.unshuffled.links(t)) {
        worst_gap = std::max(worst_gap, t - last[e.u * n + e.v]);
        last[e.u * n + e.v] = t;
      }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) EXPECT_GE(last[i * n + j], 0) << "edge " << i << "-" << j;
    const auto [lo, hi] = std::minmax_element(r.counters.disabled.begin(), r.counters.disabled.end());
    EXPECT_LE(*hi - *lo, n - 1) << "n=" << n;
    EXPECT_LE(worst_gap, 2 * (n - 1)) << "n=" << n;
  }
}

TEST(Fcp, ShuffleIsUniformPermutation) {
  std::vector<std::vector<int>> counts(4, std::vector<int>(4, 0));
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    auto o = shuffled_order(4, seed);
    for (int k = 0; k < 4; ++k) ++counts[k][o[k]];
  }
  for (const auto& row : counts)
    for (int c : row) EXPECT_NEAR(c, 1000, 150);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(bounded_uniform(rng, 7), 7u);
  EXPECT_EQ(bounded_uniform(rng, 1), 0u);
}

}  // namespace
}  // namespace gnsstopo
