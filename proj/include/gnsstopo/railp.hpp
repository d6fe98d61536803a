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

// Routing-agnostic delay model. Access patterns (non-anchor to anchor, anchor
// to ground) are multiplied with sliding-window probe matrices; every zero in
// a product marks a window with no access, and the number of such zeros
// equals the slot-count delay of the pattern.
//
// Extra variable names on top of the x_/l_ families:
//   delta_i_w_c   window of length w starting at slot c of non-anchor i has access
//   lambda_i_w_c  same for anchor i towards the ground

#pragma once

#include <stdexcept>
#include <vector>

#include "gnsstopo/ilp_exact.hpp"
#include "gnsstopo/ilp_model.hpp"
#include "gnsstopo/scenario.hpp"

namespace gnsstopo {

using BinaryRow = std::vector<int>;
using IntMatrix = std::vector<std::vector<int>>;

// T x (T-t+1) matrix; column c has ones in rows c .. c+t-1 (0-based).
inline IntMatrix probe_matrix(int t, int T) {
  if (T < 1 || t < 1 || t > T)
    throw std::out_of_range("probe length " + std::to_string(t) + " outside 1.." + std::to_string(T));
  IntMatrix p(T, std::vector<int>(T - t + 1, 0));
  for (int c = 0; c <= T - t; ++c)
    for (int r = c; r < c + t; ++r) p[r][c] = 1;
  return p;
}

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.empty()) return {};
  if (a.front().size() != b.size()) throw std::invalid_argument("matrix dimensions do not agree");
  const std::size_t cols = b.empty() ? 0 : b.front().size();
  IntMatrix out(a.size(), std::vector<int>(cols, 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < cols; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

// Slots until the next access at or after each slot. A trailing run without
// access counts towards a virtual access right after the horizon.
inline std::vector<int> zero_run_delay(const BinaryRow& row) {
  std::vector<int> d(row.size(), 0);
  int next = static_cast<int>(row.size());
  for (int t = static_cast<int>(row.size()) - 1; t >= 0; --t) {
    if (row[t]) next = t;
    d[t] = next - t;
  }
  return d;
}

// Zeros across pattern * P(1) .. pattern * P(T).
inline long long count_probe_zeros(const IntMatrix& pattern) {
  if (pattern.empty()) return 0;
  const int T = static_cast<int>(pattern.front().size());
  long long zeros = 0;
  for (int t = 1; t <= T; ++t)
    for (const auto& row : multiply(pattern, probe_matrix(t, T)))
      for (int v : row) zeros += v == 0;
  return zeros;
}

// Sum of k(k+1)/2 over maximal zero runs of a row.
inline long long zero_run_total(const BinaryRow& row) {
  long long total = 0, run = 0;
  for (int v : row) {
    if (v) {
      total += run * (run + 1) / 2;
      run = 0;
    } else {
      ++run;
    }
  }
  return total + run * (run + 1) / 2;
}

// Rows of the non-anchor (kind na) or anchor (kind ag) access pattern of a
// realised schedule, in the order of state.non_anchors() / state.anchors().
inline IntMatrix access_pattern(const TopologySchedule& x, const ScenarioState& state, EdgeClass kind) {
  const auto& rows = kind == EdgeClass::na ? state.non_anchors() : state.anchors();
  IntMatrix p(rows.size(), BinaryRow(x.slot_count(), 0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int t = 0; t < x.slot_count(); ++t) {
      auto j = x.partner(rows[r], t);
      if (!j) continue;
      NodeRole target = kind == EdgeClass::na ? NodeRole::anchor : NodeRole::ground;
      p[r][t] = state.role(*j) == target;
    }
  }
  return p;
}

inline std::string delta_name(NodeIndex i, int w, int c) {
  return "delta_" + std::to_string(i + 1) + "_" + std::to_string(w) + "_" + std::to_string(c + 1);
}

inline std::string lambda_name(NodeIndex i, int w, int c) {
  return "lambda_" + std::to_string(i + 1) + "_" + std::to_string(w) + "_" + std::to_string(c + 1);
}

// Weighted count of non-zero windows, the quantity the routing-agnostic
// model maximises, for a realised schedule.
inline double railp_objective(const TopologySchedule& x, const ScenarioState& state, const TrafficProfile& traffic,
                              double gamma) {
  const long long T = state.slot_count();
  const long long windows = T * (T + 1) / 2;
  double na = 0, ag = 0;
  auto psi = access_pattern(x, state, EdgeClass::na);
  for (std::size_t r = 0; r < psi.size(); ++r)
    na += static_cast<double>(traffic.packets(state.non_anchors()[r], 0)) *
          static_cast<double>(windows - zero_run_total(psi[r]));
  auto phi = access_pattern(x, state, EdgeClass::ag);
  for (std::size_t r = 0; r < phi.size(); ++r)
    ag += static_cast<double>(traffic.packets(state.anchors()[r], 0)) *
          static_cast<double>(windows - zero_run_total(phi[r]));
  return gamma * na + (1 - gamma) * ag;
}

inline IlpModel build_railp(const ScenarioState& state, const TrafficProfile& traffic, const SystemParams& params) {
  const int T = state.slot_count();
  params.validate(T);
  if (traffic.node_count() != state.node_count() || traffic.slot_count() != T)
    throw ValidationError("traffic dimensions do not match the state");
  IlpModel m;
  detail::add_topology_constraints(m, state, params);
  if (!traffic.uniform_over_slots())
    m.comments.push_back("warning: traffic varies over slots; row weights use slot 1");

  std::vector<Term> obj;
  auto add_family = [&](const std::vector<NodeIndex>& rows, NodeRole target, bool is_delta, double weight,
                        double big) {
    for (NodeIndex i : rows) {
      // Access indicator per slot as a linear expression over x.
      std::vector<std::vector<Term>> access(T);
      for (int t = 0; t < T; ++t)
        for (NodeIndex j = 0; j < state.node_count(); ++j)
          if (state.visible(i, j) && state.role(j) == target) access[t].push_back({*m.find(x_name(i, j, t)), 1});
      const double f = static_cast<double>(traffic.packets(i, 0));
      for (int w = 1; w <= T; ++w) {
        for (int c = 0; c <= T - w; ++c) {
          std::string name = is_delta ? delta_name(i, w, c) : lambda_name(i, w, c);
          int d = m.add_variable(name, VarKind::binary);
          std::vector<Term> sum;
          for (int t = c; t < c + w; ++t) sum.insert(sum.end(), access[t].begin(), access[t].end());
          std::vector<Term> lo{{d, 1}}, hi{{d, -big}};
          for (const Term& s : sum) {
            lo.push_back({s.var, -1});
            hi.push_back(s);
          }
          m.add_constraint("lo_" + name, std::move(lo), Sense::le, 0);
          m.add_constraint("hi_" + name, std::move(hi), Sense::le, 0);
          if (weight * f != 0) obj.push_back({d, weight * f});
        }
      }
    }
  };
  add_family(state.non_anchors(), NodeRole::anchor, true, params.gamma, params.m_bar);
  add_family(state.anchors(), NodeRole::ground, false, 1 - params.gamma, params.m_tilde);
  m.set_objective(ObjectiveSense::maximize, std::move(obj));
  m.source = std::make_shared<const ModelSource>(ModelSource{ModelKind::railp, state, traffic, params});
  return m;
}

// Full assignment of a routing-agnostic model for a topology: every window
// indicator is set to 1 exactly when its window sees an access.
inline std::vector<std::int64_t> railp_assignment(const IlpModel& m, const TopologySchedule& x) {
  if (!m.source || m.source->kind != ModelKind::railp) throw std::logic_error("model was not built by build_railp");
  const auto& state = m.source->state;
  const int T = state.slot_count();
  std::vector<std::int64_t> values(m.variables().size(), 0);
  detail::fill_topology(m, state, x, values);
  auto fill = [&](EdgeClass kind, bool is_delta) {
    const auto& rows = kind == EdgeClass::na ? state.non_anchors() : state.anchors();
    auto pattern = access_pattern(x, state, kind);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int w = 1; w <= T; ++w)
        for (int c = 0; c <= T - w; ++c) {
          bool any = false;
          for (int t = c; t < c + w; ++t) any = any || pattern[r][t];
          values[*m.find(is_delta ? delta_name(rows[r], w, c) : lambda_name(rows[r], w, c))] = any;
        }
  };
  fill(EdgeClass::na, true);
  fill(EdgeClass::ag, false);
  return values;
}

}  // namespace gnsstopo
