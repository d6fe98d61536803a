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

// Test helpers: tiny random instances and exhaustive optimisers over every
// per-slot matching sequence.

#pragma once

#include <functional>
#include <optional>
#include <random>

#include "gnsstopo/gnsstopo.hpp"

namespace gnsstopo::testing {

// 3 or 4 satellites plus one antenna, 2 or 3 slots, sparse visibility and
// tight capacities so that buffering and blocking both happen.
inline Scenario tiny_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int sats = 3 + static_cast<int>(rng() % 2);
  const int slots = 2 + static_cast<int>(rng() % 2);
  Scenario sc;
  sc.name = "tiny-" + std::to_string(seed);
  for (int i = 1; i <= sats; ++i) sc.nodes.push_back({"s" + std::to_string(i), NodeKind::satellite, ""});
  sc.nodes.push_back({"g", NodeKind::gs_antenna, "G"});
  const std::size_t n = sc.nodes.size(), gs = n - 1;
  BinaryMatrix v(n);
  for (std::size_t i = 0; i < gs; ++i)
    for (std::size_t j = i + 1; j < gs; ++j)
      if (rng() % 2) v.set_symmetric(i, j, 1);
  bool anchor = false;
  for (std::size_t i = 0; i < gs; ++i)
    if (rng() % 3 == 0) v.set_symmetric(i, gs, 1), anchor = true;
  if (!anchor) v.set_symmetric(rng() % gs, gs, 1);
  sc.states.emplace_back(1, slots, sc.nodes, v);
  sc.traffic = {1, 1, {"s1", "s3"}, {}};
  sc.params.c_ss = 2;
  sc.params.c_sg = 3;
  sc.params.b_max = 6;
  sc.params.l_min = seed % 3 == 0 ? 1 : 0;
  sc.params = sc.params.tightened(slots);
  return sc;
}

// Every matching of the visible pairs, the empty one included.
inline std::vector<std::vector<Edge>> all_matchings(const ScenarioState& s) {
  const auto pairs = s.visible_pairs();
  std::vector<std::vector<Edge>> out;
  std::vector<Edge> cur;
  std::vector<bool> used(s.node_count(), false);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == pairs.size()) {
      out.push_back(cur);
      return;
    }
    rec(k + 1);
    const Edge& e = pairs[k];
    if (used[e.u] || used[e.v]) return;
    used[e.u] = used[e.v] = true;
    cur.push_back(e);
    rec(k + 1);
    cur.pop_back();
    used[e.u] = used[e.v] = false;
  };
  rec(0);
  return out;
}

inline bool meets_ranging(const TopologySchedule& x, const ScenarioState& s, int l_min) {
  for (NodeIndex i : s.satellites()) {
    int partners = 0;
    for (NodeIndex j : s.satellites()) {
      bool linked = false;
      for (int t = 0; t < x.slot_count(); ++t) linked = linked || x.at(i, j, t);
      partners += linked;
    }
    if (partners < l_min) return false;
  }
  return true;
}

// Visits every schedule that satisfies the ranging requirement.
inline void for_each_schedule(const ScenarioState& s, int l_min, const std::function<void(const TopologySchedule&)>& f) {
  const auto ms = all_matchings(s);
  const int T = s.slot_count();
  std::vector<std::size_t> pick(T, 0);
  while (true) {
    TopologySchedule x(s.node_count(), T);
    for (int t = 0; t < T; ++t)
      for (const Edge& e : ms[pick[t]]) x.link(e.u, e.v, t);
    if (meets_ranging(x, s, l_min)) f(x);
    int t = 0;
    while (t < T && ++pick[t] == ms.size()) pick[t++] = 0;
    if (t == T) break;
  }
}

// Optimum of a model over all feasible schedules; nullopt when none is.
inline std::optional<double> exhaustive_optimum(const IlpModel& m) {
  const auto& src = *m.source;
  std::optional<double> best;
  const bool minimize = m.sense() == ObjectiveSense::minimize;
  for_each_schedule(src.state, src.params.l_min, [&](const TopologySchedule& x) {
    auto values = src.kind == ModelKind::ilp ? ilp_assignment(m, x) : railp_assignment(m, x);
    if (!check_assignment(m, values).empty()) return;
    const double v = m.evaluate_objective(values);
    if (!best || (minimize ? v < *best : v > *best)) best = v;
  });
  return best;
}

}  // namespace gnsstopo::testing
