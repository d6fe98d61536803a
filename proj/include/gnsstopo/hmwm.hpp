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

// Slot-by-slot matching heuristic. Each slot, every link candidate gets a
// weight mixing a traffic term (move data from loaded non-anchors towards
// anchors and from anchors to the ground) with a ranging-urgency term, and
// the heaviest perfect (or maximum-cardinality) matching is scheduled. Node
// weights then follow the simulated traffic into the next slot.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gnsstopo/matching.hpp"
#include "gnsstopo/scenario.hpp"

namespace gnsstopo {

// Traffic term. For na edges `rho_i` belongs to the non-anchor, for ag
// edges to the anchor.
inline double comm_weight(EdgeClass c, double rho_i, double rho_j, double q) {
  switch (c) {
    case EdgeClass::na: return rho_i - rho_j;
    case EdgeClass::ag: return rho_i;
    case EdgeClass::nn:
    case EdgeClass::aa: return -q;
    case EdgeClass::none: break;
  }
  throw std::invalid_argument("edge class has no traffic weight");
}

// Urgency of node i towards a partner it has not linked with yet. `slot`
// is 1-based; `partners` counts distinct satellite partners before it.
inline double ranging_urgency(bool linked_before, int partners, int l_min, int slot, int slots, double alpha,
                              double beta) {
  if (slot < 1 || slot > slots) throw std::out_of_range("slot outside the state");
  if (linked_before) return 0;
  double need = std::max(0, l_min - partners);
  return beta * std::pow(need / static_cast<double>(slots - slot + 1), alpha);
}

// Ranging term of an edge: the mean urgency of its two ends; zero towards
// the ground.
inline double ranging_weight(EdgeClass c, bool linked_before, int partners_i, int partners_j, int l_min, int slot,
                             int slots, double alpha, double beta) {
  if (c == EdgeClass::ag) return 0;
  if (c == EdgeClass::none) throw std::invalid_argument("edge class has no ranging weight");
  return (ranging_urgency(linked_before, partners_i, l_min, slot, slots, alpha, beta) +
          ranging_urgency(linked_before, partners_j, l_min, slot, slots, alpha, beta)) /
         2;
}

// Node weights for the next slot. `mate[i]` is i's partner this slot or -1,
// `next_traffic[i]` the packets i generates next slot. All changes use the
// current weights on both sides.
inline std::vector<double> update_node_weights(const ScenarioState& state, const std::vector<double>& rho,
                                               const std::vector<int>& mate, const std::vector<Packets>& next_traffic,
                                               const SystemParams& params) {
  const std::size_t n = state.node_count();
  if (mate.size() != n || rho.size() != n || next_traffic.size() != n)
    throw std::invalid_argument("node weight update: size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    int j = mate[i];
    if (j < 0) continue;
    if (static_cast<std::size_t>(j) >= n || mate[j] != static_cast<int>(i) || !state.visible(i, j))
      throw std::invalid_argument("node weight update: invalid matching at node " + std::to_string(i + 1));
  }
  std::vector<double> out(n, 0);
  const double css = static_cast<double>(params.c_ss), csg = static_cast<double>(params.c_sg);
  for (NodeIndex i : state.satellites()) {
    const double f = static_cast<double>(next_traffic[i]);
    const int j = mate[i];
    const NodeRole other = j < 0 ? NodeRole::ground : state.role(j);
    double r = rho[i];
    if (j < 0) {
      r += f;
    } else if (state.role(i) == NodeRole::non_anchor) {
      r = other == NodeRole::anchor ? std::max(0.0, r - css) + f : r + f;
    } else if (other == NodeRole::non_anchor) {
      r = r + std::min(rho[j], css) + f;
    } else if (other == NodeRole::ground) {
      r = std::max(0.0, r - csg) + f;
    } else {
      r += f;
    }
    out[i] = r;
  }
  return out;
}

struct HmwmOptions {
  MatchingMode mode = MatchingMode::perfect_preferred;
};

struct WeightedEdgeValue {
  Edge edge;
  double weight = 0;
};

// Per-slot record of a run, for inspection and tests.
struct HmwmSlotTrace {
  std::vector<double> rho;                  // node weights used for this slot
  std::vector<WeightedEdgeValue> weights;   // every link candidate
  std::vector<Edge> matching;
};

struct HmwmResult {
  TopologySchedule schedule;
  std::vector<HmwmSlotTrace> trace;
};

namespace detail {

// Integer grid on which this slot's weights are exact whenever the inputs
// are short decimals and alpha is a whole number.
inline double hmwm_scale(const SystemParams& p, int remaining) {
  if (p.alpha == std::floor(p.alpha) && p.alpha >= 0 && p.alpha <= 8) {
    double s = 2.0 * std::pow(static_cast<double>(remaining), p.alpha) * 1e6;
    if (s < 1e12) return s;
  }
  return 1048576.0;
}

}  // namespace detail

inline HmwmResult schedule_state_hmwm(const ScenarioState& state, const TrafficProfile& traffic,
                                      const SystemParams& params, const HmwmOptions& opt = {}) {
  const int T = state.slot_count();
  const std::size_t n = state.node_count();
  HmwmResult res{TopologySchedule(n, T), {}};
  if (T == 0) return res;
  const auto candidates = state.link_candidates();
  std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
  std::vector<int> partners(n, 0);
  std::vector<double> rho(n, 0);
  for (NodeIndex i : state.satellites()) rho[i] = static_cast<double>(traffic.packets(i, 0));

  for (int t = 0; t < T; ++t) {
    const int slot = t + 1;
    const double scale = detail::hmwm_scale(params, T - slot + 1);
    HmwmSlotTrace tr;
    tr.rho = rho;
    std::vector<WeightedEdge> edges;
    for (const Edge& e : candidates) {
      EdgeClass c = classify_edge(state, e.u, e.v);
      NodeIndex i = e.u, j = e.v;
      if ((c == EdgeClass::na && state.role(i) != NodeRole::non_anchor) ||
          (c == EdgeClass::ag && state.role(i) != NodeRole::anchor))
        std::swap(i, j);
      double wc = comm_weight(c, rho[i], rho[j], params.q);
      double wr = ranging_weight(c, linked[i][j], partners[i], partners[j], params.l_min, slot, T, params.alpha,
                                 params.beta);
      double w = params.eta * wc + (1 - params.eta) * wr;
      tr.weights.push_back({e, w});
      edges.push_back({static_cast<int>(e.u), static_cast<int>(e.v), quantize_weight(w, scale)});
    }
    MatchingResult m = canonical_matching(static_cast<int>(n), edges, opt.mode);
    for (auto [u, v] : m.edges()) {
      res.schedule.link(u, v, t);
      tr.matching.push_back({static_cast<NodeIndex>(u), static_cast<NodeIndex>(v)});
      if (state.is_satellite(u) && state.is_satellite(v) && !linked[u][v]) {
        linked[u][v] = linked[v][u] = true;
        ++partners[u];
        ++partners[v];
      }
    }
    if (t + 1 < T) {
      std::vector<Packets> next(n, 0);
      for (NodeIndex i = 0; i < n; ++i) next[i] = traffic.packets(i, t + 1);
      rho = update_node_weights(state, rho, m.mate, next, params);
    }
    res.trace.push_back(std::move(tr));
  }
  return res;
}

}  // namespace gnsstopo
