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

// Fairness-driven baseline: each slot schedules the matching with the most
// accumulated disabled contact time, then the slot order is shuffled.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gnsstopo/matching.hpp"
#include "gnsstopo/scenario.hpp"

namespace gnsstopo {

// Disabled-time counters on the link candidates of a state.
struct FairnessCounters {
  std::vector<Edge> edges;
  std::vector<std::int64_t> disabled;
};

// Uniform integer in [0, bound) from a 64-bit engine, by rejection, so the
// result does not depend on the standard library's distributions.
inline std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

// Fisher-Yates permutation of 0..n-1.
inline std::vector<int> shuffled_order(int n, std::uint64_t seed) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[bounded_uniform(rng, static_cast<std::uint64_t>(i) + 1)]);
  return order;
}

struct FcpResult {
  TopologySchedule schedule;        // after the slot shuffle
  TopologySchedule unshuffled;
  std::vector<int> order;           // slot k of `schedule` is slot order[k] of `unshuffled`
  FairnessCounters counters;        // state after the last slot
};

inline FcpResult schedule_state_fcp(const ScenarioState& state, std::uint64_t seed) {
  const int T = state.slot_count();
  const std::size_t n = state.node_count();
  FcpResult res{TopologySchedule(n, T), TopologySchedule(n, T), {}, {state.link_candidates(), {}}};
  auto& c = res.counters;
  c.disabled.assign(c.edges.size(), 0);
  for (int t = 0; t < T; ++t) {
    std::vector<WeightedEdge> edges;
    for (std::size_t k = 0; k < c.edges.size(); ++k)
      edges.push_back({static_cast<int>(c.edges[k].u), static_cast<int>(c.edges[k].v), c.disabled[k]});
    MatchingResult m = canonical_matching(static_cast<int>(n), edges, MatchingMode::perfect_preferred);
    for (std::size_t k = 0; k < c.edges.size(); ++k) {
      const Edge& e = c.edges[k];
      if (m.mate[e.u] == static_cast<int>(e.v)) {
        res.unshuffled.link(e.u, e.v, t);
        c.disabled[k] = 0;
      } else {
        ++c.disabled[k];
      }
    }
  }
  res.order = shuffled_order(T, seed);
  res.schedule = res.unshuffled.permuted(res.order);
  return res;
}

}  // namespace gnsstopo
