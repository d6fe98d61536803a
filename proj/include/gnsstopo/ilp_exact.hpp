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

// Exact routing-aware model: link, ranging, per-flow routing and buffer
// variables with an age-weighted buffer objective.
//
// Variable names (1-based indices, i < j for link pairs):
//   x_i_j_t    link between nodes i and j in slot t
//   l_i_j      satellites i and j linked at least once
//   r_k_i_j_t  packets of flow k sent from i to j in slot t
//   b_k_i_t    packets of flow k buffered at satellite i after slot t
// Flow k is the k-th entry of TrafficProfile::flows(); the mapping is
// repeated in the LP header comments.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gnsstopo/ilp_model.hpp"
#include "gnsstopo/routing.hpp"
#include "gnsstopo/scenario.hpp"

namespace gnsstopo {

inline std::string x_name(NodeIndex i, NodeIndex j, int t) {
  if (i > j) std::swap(i, j);
  return "x_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_" + std::to_string(t + 1);
}

inline std::string l_name(NodeIndex i, NodeIndex j) {
  if (i > j) std::swap(i, j);
  return "l_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

inline std::string r_name(std::size_t k, NodeIndex i, NodeIndex j, int t) {
  return "r_" + std::to_string(k + 1) + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_" +
         std::to_string(t + 1);
}

inline std::string b_name(std::size_t k, NodeIndex i, int t) {
  return "b_" + std::to_string(k + 1) + "_" + std::to_string(i + 1) + "_" + std::to_string(t + 1);
}

namespace detail {

// Link and ranging families shared by both models.
inline void add_topology_constraints(IlpModel& m, const ScenarioState& state, const SystemParams& params) {
  const int T = state.slot_count();
  const std::size_t n = state.node_count();
  std::vector<Edge> pairs = state.visible_pairs();
  for (const Edge& e : pairs)
    for (int t = 0; t < T; ++t) m.add_variable(x_name(e.u, e.v, t), VarKind::binary);
  for (const Edge& e : pairs)
    if (state.is_satellite(e.u) && state.is_satellite(e.v)) m.add_variable(l_name(e.u, e.v), VarKind::binary);

  for (int t = 0; t < T; ++t) {
    for (NodeIndex i = 0; i < n; ++i) {
      std::vector<Term> deg;
      for (NodeIndex j = 0; j < n; ++j)
        if (state.visible(i, j)) deg.push_back({*m.find(x_name(i, j, t)), 1});
      if (deg.size() > 1)
        m.add_constraint("deg_" + std::to_string(i + 1) + "_" + std::to_string(t + 1), std::move(deg), Sense::le, 1);
    }
  }
  for (const Edge& e : pairs) {
    if (!state.is_satellite(e.u) || !state.is_satellite(e.v)) continue;
    int l = *m.find(l_name(e.u, e.v));
    std::vector<Term> lo{{l, 1}}, hi{{l, -params.m_dot}};
    for (int t = 0; t < T; ++t) {
      int x = *m.find(x_name(e.u, e.v, t));
      lo.push_back({x, -1});
      hi.push_back({x, 1});
    }
    std::string tag = std::to_string(e.u + 1) + "_" + std::to_string(e.v + 1);
    m.add_constraint("rlo_" + tag, std::move(lo), Sense::le, 0);
    m.add_constraint("rhi_" + tag, std::move(hi), Sense::le, 0);
  }
  if (params.l_min > 0) {
    for (NodeIndex i : state.satellites()) {
      std::vector<Term> terms;
      for (NodeIndex j : state.satellites())
        if (j != i && state.visible(i, j)) terms.push_back({*m.find(l_name(i, j)), 1});
      m.add_constraint("lmin_" + std::to_string(i + 1), std::move(terms), Sense::ge, params.l_min);
    }
  }
}

// Directed arcs that get routing variables: n->a and a->g carry traffic,
// n->n and a->a exist only to be pinned at zero.
inline std::vector<std::pair<NodeIndex, NodeIndex>> routing_arcs(const ScenarioState& state) {
  std::vector<std::pair<NodeIndex, NodeIndex>> arcs;
  for (NodeIndex i : state.satellites()) {
    for (NodeIndex j = 0; j < state.node_count(); ++j) {
      if (i == j || !state.visible(i, j)) continue;
      NodeRole a = state.role(i), b = state.role(j);
      bool na = a == NodeRole::non_anchor && b == NodeRole::anchor;
      bool ag = a == NodeRole::anchor && b == NodeRole::ground;
      bool nn = a == NodeRole::non_anchor && b == NodeRole::non_anchor;
      bool aa = a == NodeRole::anchor && b == NodeRole::anchor;
      if (na || ag || nn || aa) arcs.emplace_back(i, j);
    }
  }
  return arcs;
}

}  // namespace detail

inline IlpModel build_ilp(const ScenarioState& state, const TrafficProfile& traffic, const SystemParams& params) {
  const int T = state.slot_count();
  params.validate(T);
  if (traffic.node_count() != state.node_count() || traffic.slot_count() != T)
    throw ValidationError("traffic dimensions do not match the state");
  IlpModel m;
  detail::add_topology_constraints(m, state, params);

  const auto flows = traffic.flows();
  const auto arcs = detail::routing_arcs(state);
  for (std::size_t k = 0; k < flows.size(); ++k) {
    m.comments.push_back("flow " + std::to_string(k + 1) + ": source " + state.nodes()[flows[k].source].name +
                         " slot " + std::to_string(flows[k].start_slot + 1) + " size " +
                         std::to_string(flows[k].size));
  }
  for (std::size_t k = 0; k < flows.size(); ++k) {
    for (int t = flows[k].start_slot; t < T; ++t) {
      for (auto [i, j] : arcs) m.add_variable(r_name(k, i, j, t), VarKind::integer);
      for (NodeIndex i : state.satellites()) m.add_variable(b_name(k, i, t), VarKind::integer);
    }
  }

  // Conservation at every satellite for every slot the flow exists.
  for (std::size_t k = 0; k < flows.size(); ++k) {
    const Flow& f = flows[k];
    for (int t = f.start_slot; t < T; ++t) {
      for (NodeIndex i : state.satellites()) {
        std::vector<Term> terms;
        for (auto [a, b] : arcs) {
          if (a == i) terms.push_back({*m.find(r_name(k, a, b, t)), 1});
          if (b == i) terms.push_back({*m.find(r_name(k, a, b, t)), -1});
        }
        terms.push_back({*m.find(b_name(k, i, t)), 1});
        if (t > f.start_slot) terms.push_back({*m.find(b_name(k, i, t - 1)), -1});
        double rhs = (i == f.source && t == f.start_slot) ? static_cast<double>(f.size) : 0.0;
        m.add_constraint("flow_" + std::to_string(k + 1) + "_" + std::to_string(i + 1) + "_" + std::to_string(t + 1),
                         std::move(terms), Sense::eq, rhs);
      }
    }
  }
  for (NodeIndex i : state.satellites()) {
    for (int t = 0; t < T; ++t) {
      std::vector<Term> terms;
      for (std::size_t k = 0; k < flows.size(); ++k)
        if (flows[k].start_slot <= t) terms.push_back({*m.find(b_name(k, i, t)), 1});
      if (!terms.empty())
        m.add_constraint("buf_" + std::to_string(i + 1) + "_" + std::to_string(t + 1), std::move(terms), Sense::le,
                         static_cast<double>(params.b_max));
    }
  }
  for (auto [i, j] : arcs) {
    EdgeClass c = classify_edge(state, i, j);
    for (int t = 0; t < T; ++t) {
      std::vector<Term> terms;
      for (std::size_t k = 0; k < flows.size(); ++k)
        if (flows[k].start_slot <= t) terms.push_back({*m.find(r_name(k, i, j, t)), 1});
      if (terms.empty()) continue;
      std::string tag = std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_" + std::to_string(t + 1);
      if (c == EdgeClass::na) {
        m.add_constraint("css_" + tag, terms, Sense::le, static_cast<double>(params.c_ss));
      } else if (c == EdgeClass::ag) {
        m.add_constraint("csg_" + tag, terms, Sense::le, static_cast<double>(params.c_sg));
      } else {
        m.add_constraint((c == EdgeClass::nn ? "nn_" : "aa_") + tag, terms, Sense::eq, 0);
      }
      terms.push_back({*m.find(x_name(i, j, t)), -params.m_big});
      m.add_constraint("on_" + tag, std::move(terms), Sense::le, 0);
    }
  }
  std::vector<Term> obj;
  for (std::size_t k = 0; k < flows.size(); ++k)
    for (int t = flows[k].start_slot + 1; t < T; ++t)
      for (NodeIndex i : state.satellites())
        obj.push_back({*m.find(b_name(k, i, t)), static_cast<double>(t - flows[k].start_slot)});
  m.set_objective(ObjectiveSense::minimize, std::move(obj));
  m.source = std::make_shared<const ModelSource>(ModelSource{ModelKind::ilp, state, traffic, params});
  return m;
}

namespace detail {

// Writes x and l for a schedule into `values`.
inline void fill_topology(const IlpModel& m, const ScenarioState& state, const TopologySchedule& x,
                          std::vector<std::int64_t>& values) {
  for (const Edge& e : state.visible_pairs()) {
    bool any = false;
    for (int t = 0; t < state.slot_count(); ++t) {
      values[*m.find(x_name(e.u, e.v, t))] = x.at(e.u, e.v, t);
      any = any || x.at(e.u, e.v, t);
    }
    if (state.is_satellite(e.u) && state.is_satellite(e.v)) values[*m.find(l_name(e.u, e.v))] = any;
  }
}

}  // namespace detail

// Full assignment for an exact model given a topology: routing follows the
// oldest-first rule, so the result is the model point the solver reports.
inline std::vector<std::int64_t> ilp_assignment(const IlpModel& m, const TopologySchedule& x) {
  if (!m.source || m.source->kind != ModelKind::ilp) throw std::logic_error("model was not built by build_ilp");
  const auto& src = *m.source;
  const auto& state = src.state;
  std::vector<std::int64_t> values(m.variables().size(), 0);
  detail::fill_topology(m, state, x, values);
  const auto flows = src.traffic.flows();
  std::vector<std::vector<std::size_t>> flow_of(state.node_count(), std::vector<std::size_t>(state.slot_count()));
  for (std::size_t k = 0; k < flows.size(); ++k) flow_of[flows[k].source][flows[k].start_slot] = k;
  BufferSet buffers(state.node_count());
  for (int t = 0; t < state.slot_count(); ++t) {
    std::vector<Packets> gen(state.node_count());
    for (NodeIndex i = 0; i < state.node_count(); ++i) gen[i] = src.traffic.packets(i, t);
    for (const Transfer& mv : route_slot(state, src.params, buffers, x.links(t), t, gen))
      values[*m.find(r_name(flow_of[mv.lot.source][mv.lot.gen], mv.from, mv.to, t))] += mv.lot.count;
    for (NodeIndex i : state.satellites())
      for (const Lot& lot : buffers.queue(i)) values[*m.find(b_name(flow_of[lot.source][lot.gen], i, t))] = lot.count;
  }
  return values;
}

// Reads the link tensor back out of a solution of either model.
inline TopologySchedule extract_topology(const IlpModel& m, const IlpSolution& sol, const ScenarioState& state) {
  if (!sol.has_assignment()) throw std::runtime_error(std::string("cannot extract topology: status ") +
                                                      to_string(sol.status));
  TopologySchedule x(state.node_count(), state.slot_count());
  for (const Edge& e : state.visible_pairs()) {
    for (int t = 0; t < state.slot_count(); ++t) {
      auto id = m.find(x_name(e.u, e.v, t));
      if (!id) throw ValidationError("model lacks " + x_name(e.u, e.v, t));
      std::int64_t v = sol.values.at(*id);
      if (v != 0 && v != 1) throw ValidationError(x_name(e.u, e.v, t) + " is not binary");
      if (v) x.link(e.u, e.v, t);
    }
  }
  auto bad = validate_topology(x, state);
  if (!bad.empty()) throw ValidationError("extracted topology invalid: " + bad.front().describe());
  return x;
}

}  // namespace gnsstopo
