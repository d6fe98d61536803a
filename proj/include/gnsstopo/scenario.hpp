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

// Core domain types for time-slotted satellite topology design: one
// fixed-visibility state, its traffic, the system parameters and the binary
// link tensor produced by every scheduler, plus the validity and ranging
// checks shared by all algorithms.
//
// Indexing convention: nodes and slots are 0-based in code. Anything written
// to disk (LP names, schedule files) is 1-based.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gnsstopo {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind { satellite, gs_antenna };

// Role of a node inside one state. Anchors are satellites that see at least
// one ground antenna.
enum class NodeRole { non_anchor, anchor, ground };

// Edge classes used by the heuristics. `none` covers antenna-antenna pairs,
// which never carry a link.
enum class EdgeClass { nn, na, aa, ag, none };

struct Node {
  std::string name;
  NodeKind kind = NodeKind::satellite;
  std::string gs_group;  // physical ground station, empty for satellites
};

using NodeIndex = std::size_t;
using Packets = std::int64_t;

struct Edge {
  NodeIndex u = 0;
  NodeIndex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(NodeIndex a, NodeIndex b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

// Dense square 0/1 matrix. Values other than 0/1 can be stored so that
// ingestion errors are detectable.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  explicit BinaryMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}

  std::size_t size() const { return n_; }
  std::uint8_t operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  std::uint8_t& operator()(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }

  void set_symmetric(std::size_t i, std::size_t j, std::uint8_t value) {
    (*this)(i, j) = value;
    (*this)(j, i) = value;
  }

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Throws unless `m` is binary, symmetric and has a zero diagonal.
inline void check_visibility_matrix(const BinaryMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m(i, i) != 0) {
      throw ValidationError("visibility diagonal entry (" + std::to_string(i + 1) + "," +
                            std::to_string(i + 1) + ") must be 0");
    }
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m(i, j) > 1) {
        throw ValidationError("visibility entry (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") is not binary");
      }
      if (m(i, j) != m(j, i)) {
        throw ValidationError("visibility is not symmetric at pair (" + std::to_string(i + 1) +
                              "," + std::to_string(j + 1) + ")");
      }
    }
  }
}

struct NodePartition {
  std::vector<NodeIndex> anchors;
  std::vector<NodeIndex> non_anchors;
};

// Splits the satellites (every node not listed in `gs_ids`) into anchors and
// non-anchors by scanning their visibility rows.
inline NodePartition classify_nodes(const BinaryMatrix& visibility,
                                    std::span<const NodeIndex> gs_ids) {
  check_visibility_matrix(visibility);
  std::vector<bool> is_gs(visibility.size(), false);
  for (NodeIndex g : gs_ids) {
    if (g >= visibility.size()) throw ValidationError("ground node index out of range");
    is_gs[g] = true;
  }
  NodePartition out;
  for (NodeIndex i = 0; i < visibility.size(); ++i) {
    if (is_gs[i]) continue;
    bool anchor = std::any_of(gs_ids.begin(), gs_ids.end(),
                              [&](NodeIndex g) { return visibility(i, g) == 1; });
    (anchor ? out.anchors : out.non_anchors).push_back(i);
  }
  return out;
}

// One fixed-visibility state. Immutable after construction.
class ScenarioState {
 public:
  ScenarioState(int index, int slot_count, std::vector<Node> nodes, BinaryMatrix visibility)
      : index_(index), slot_count_(slot_count), nodes_(std::move(nodes)),
        visibility_(std::move(visibility)) {
    if (slot_count_ < 0) throw ValidationError("slot count must be non-negative");
    if (visibility_.size() != nodes_.size()) {
      throw ValidationError("visibility is " + std::to_string(visibility_.size()) + "x" +
                            std::to_string(visibility_.size()) + " but there are " +
                            std::to_string(nodes_.size()) + " nodes");
    }
    for (NodeIndex i = 0; i < nodes_.size(); ++i) {
      (nodes_[i].kind == NodeKind::gs_antenna ? ground_ : satellites_).push_back(i);
    }
    NodePartition p = classify_nodes(visibility_, ground_);
    anchors_ = std::move(p.anchors);
    non_anchors_ = std::move(p.non_anchors);
    roles_.assign(nodes_.size(), NodeRole::ground);
    for (NodeIndex a : anchors_) roles_[a] = NodeRole::anchor;
    for (NodeIndex n : non_anchors_) roles_[n] = NodeRole::non_anchor;
  }

  int index() const { return index_; }
  int slot_count() const { return slot_count_; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const BinaryMatrix& visibility() const { return visibility_; }
  bool visible(NodeIndex i, NodeIndex j) const { return visibility_(i, j) == 1; }

  const std::vector<NodeIndex>& satellites() const { return satellites_; }
  const std::vector<NodeIndex>& ground_nodes() const { return ground_; }
  const std::vector<NodeIndex>& anchors() const { return anchors_; }
  const std::vector<NodeIndex>& non_anchors() const { return non_anchors_; }

  NodeRole role(NodeIndex i) const { return roles_[i]; }
  bool is_satellite(NodeIndex i) const { return roles_[i] != NodeRole::ground; }

  // Same visibility with a different number of slots.
  ScenarioState with_slot_count(int slots) const {
    ScenarioState copy = *this;
    if (slots < 0) throw ValidationError("slot count must be non-negative");
    copy.slot_count_ = slots;
    return copy;
  }

  // Visible unordered pairs (u < v), lexicographic order.
  std::vector<Edge> visible_pairs() const {
    std::vector<Edge> out;
    for (NodeIndex i = 0; i < node_count(); ++i)
      for (NodeIndex j = i + 1; j < node_count(); ++j)
        if (visible(i, j)) out.push_back({i, j});
    return out;
  }

  // Visible pairs that can carry a link (excludes antenna-antenna pairs).
  std::vector<Edge> link_candidates() const {
    std::vector<Edge> out;
    for (const Edge& e : visible_pairs())
      if (is_satellite(e.u) || is_satellite(e.v)) out.push_back(e);
    return out;
  }

  std::optional<NodeIndex> find(const std::string& name) const {
    for (NodeIndex i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].name == name) return i;
    return std::nullopt;
  }

 private:
  int index_ = 0;
  int slot_count_ = 0;
  std::vector<Node> nodes_;
  BinaryMatrix visibility_;
  std::vector<NodeIndex> satellites_, ground_, anchors_, non_anchors_;
  std::vector<NodeRole> roles_;
};

inline EdgeClass classify_edge(const ScenarioState& state, NodeIndex i, NodeIndex j) {
  NodeRole a = state.role(i), b = state.role(j);
  if (a > b) std::swap(a, b);
  using R = NodeRole;
  if (a == R::non_anchor && b == R::non_anchor) return EdgeClass::nn;
  if (a == R::non_anchor && b == R::anchor) return EdgeClass::na;
  if (a == R::anchor && b == R::anchor) return EdgeClass::aa;
  if (a == R::anchor && b == R::ground) return EdgeClass::ag;
  return EdgeClass::none;
}

// A single traffic flow: the packets satellite `source` generates in slot
// `start_slot`.
struct Flow {
  NodeIndex source = 0;
  int start_slot = 0;
  Packets size = 0;
};

// Generated packets per node and slot. Ground rows are always zero.
class TrafficProfile {
 public:
  TrafficProfile() = default;

  // Every satellite generates `f_td` packets per slot, satellites flagged in
  // `service` additionally generate `f_sm`.
  TrafficProfile(const ScenarioState& state, Packets f_td, Packets f_sm, std::vector<bool> service)
      : f_td_(f_td), f_sm_(f_sm), service_(std::move(service)) {
    if (f_td < 0 || f_sm < 0) throw ValidationError("traffic sizes must be non-negative");
    service_.resize(state.node_count(), false);
    slots_ = state.slot_count();
    packets_.assign(state.node_count(), std::vector<Packets>(slots_, 0));
    for (NodeIndex i : state.satellites()) {
      for (int t = 0; t < slots_; ++t) packets_[i][t] = f_td + (service_[i] ? f_sm : 0);
    }
  }

  // Explicit per-node, per-slot counts.
  TrafficProfile(const ScenarioState& state, std::vector<std::vector<Packets>> packets)
      : packets_(std::move(packets)) {
    slots_ = state.slot_count();
    service_.assign(state.node_count(), false);
    if (packets_.size() != state.node_count()) throw ValidationError("traffic row count mismatch");
    for (NodeIndex i = 0; i < packets_.size(); ++i) {
      if (static_cast<int>(packets_[i].size()) != slots_)
        throw ValidationError("traffic row " + std::to_string(i + 1) + " has wrong slot count");
      for (Packets p : packets_[i]) {
        if (p < 0) throw ValidationError("negative traffic at node " + std::to_string(i + 1));
        if (p > 0 && !state.is_satellite(i))
          throw ValidationError("ground node " + std::to_string(i + 1) + " cannot generate traffic");
      }
    }
  }

  std::size_t node_count() const { return packets_.size(); }
  int slot_count() const { return slots_; }
  Packets packets(NodeIndex i, int slot) const { return packets_[i][slot]; }
  Packets f_td() const { return f_td_; }
  Packets f_sm() const { return f_sm_; }
  bool is_service(NodeIndex i) const { return service_[i]; }

  bool uniform_over_slots() const {
    for (const auto& row : packets_)
      for (Packets p : row)
        if (p != row.front()) return false;
    return true;
  }

  Packets total() const {
    Packets s = 0;
    for (const auto& row : packets_)
      for (Packets p : row) s += p;
    return s;
  }

  // Non-empty flows ordered by (source, start slot).
  std::vector<Flow> flows() const {
    std::vector<Flow> out;
    for (NodeIndex i = 0; i < packets_.size(); ++i)
      for (int t = 0; t < slots_; ++t)
        if (packets_[i][t] > 0) out.push_back({i, t, packets_[i][t]});
    return out;
  }

 private:
  Packets f_td_ = 0;
  Packets f_sm_ = 0;
  std::vector<bool> service_;
  int slots_ = 0;
  std::vector<std::vector<Packets>> packets_;
};

// System parameters. Defaults suit the small test scenario, except
// m_big which must strictly exceed both link capacities.
struct SystemParams {
  int l_min = 2;
  Packets b_max = 150;
  Packets c_ss = 25;
  Packets c_sg = 50;
  double gamma = 0.5;
  double eta = 0.4;
  double alpha = 2.0;
  double beta = 700.0;
  double q = 50.0;
  double m_dot = 25;
  double m_big = 51;
  double m_bar = 25;
  double m_tilde = 25;
  std::vector<int> gs_antennas{1};

  static SystemParams test_scenario() { return {}; }

  static SystemParams practical() {
    SystemParams p;
    p.l_min = 6;
    p.gamma = 0.1;
    p.eta = 0.7;
    p.alpha = 2.0;
    p.beta = 500.0;
    p.gs_antennas = {2, 2, 2};
    return p;
  }

  // Smallest big-M constants that keep every linearisation exact for
  // `slots` slots.
  SystemParams tightened(int slots) const {
    SystemParams p = *this;
    p.m_dot = slots + 1;
    p.m_big = static_cast<double>(std::max(c_ss, c_sg) + 1);
    p.m_bar = slots + 1;
    p.m_tilde = slots + 1;
    return p;
  }

  void validate(int slots) const {
    auto fail = [](const std::string& what) { throw ValidationError("invalid parameters: " + what); };
    if (l_min < 0) fail("l_min must be non-negative");
    if (b_max <= 0 || c_ss <= 0 || c_sg <= 0) fail("capacities must be positive");
    if (gamma < 0 || gamma > 1) fail("gamma must lie in [0,1]");
    if (eta < 0 || eta > 1) fail("eta must lie in [0,1]");
    if (!(m_dot > slots)) fail("m_dot must exceed the slot count");
    if (!(m_big > static_cast<double>(std::max(c_ss, c_sg)))) fail("m_big must exceed c_ss and c_sg");
    if (!(m_bar > slots) || !(m_tilde > slots)) fail("m_bar and m_tilde must exceed the slot count");
  }
};

// Binary link tensor x[i][j][t].
class TopologySchedule {
 public:
  TopologySchedule() = default;
  TopologySchedule(std::size_t nodes, int slots)
      : n_(nodes), slots_(slots), cells_(nodes * nodes * static_cast<std::size_t>(slots), 0) {}

  std::size_t node_count() const { return n_; }
  int slot_count() const { return slots_; }

  std::uint8_t at(NodeIndex i, NodeIndex j, int t) const { return cells_[offset(i, j, t)]; }
  void set(NodeIndex i, NodeIndex j, int t, std::uint8_t v) { cells_[offset(i, j, t)] = v; }

  // Symmetric link in slot t.
  void link(NodeIndex i, NodeIndex j, int t) {
    set(i, j, t, 1);
    set(j, i, t, 1);
  }

  std::optional<NodeIndex> partner(NodeIndex i, int t) const {
    for (NodeIndex j = 0; j < n_; ++j)
      if (at(i, j, t)) return j;
    return std::nullopt;
  }

  // Links in slot t as unordered pairs taken from the upper triangle.
  std::vector<Edge> links(int t) const {
    std::vector<Edge> out;
    for (NodeIndex i = 0; i < n_; ++i)
      for (NodeIndex j = i + 1; j < n_; ++j)
        if (at(i, j, t)) out.push_back({i, j});
    return out;
  }

  // New schedule whose slot k is this schedule's slot order[k].
  TopologySchedule permuted(std::span<const int> order) const {
    TopologySchedule out(n_, slots_);
    for (int k = 0; k < slots_; ++k)
      for (NodeIndex i = 0; i < n_; ++i)
        for (NodeIndex j = 0; j < n_; ++j) out.set(i, j, k, at(i, j, order[k]));
    return out;
  }

  friend bool operator==(const TopologySchedule&, const TopologySchedule&) = default;

 private:
  std::size_t offset(NodeIndex i, NodeIndex j, int t) const {
    return (static_cast<std::size_t>(t) * n_ + i) * n_ + j;
  }

  std::size_t n_ = 0;
  int slots_ = 0;
  std::vector<std::uint8_t> cells_;
};

enum class ConstraintKind { binary, symmetry, visibility, degree };

inline const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::binary: return "binary";
    case ConstraintKind::symmetry: return "symmetry";
    case ConstraintKind::visibility: return "visibility";
    case ConstraintKind::degree: return "degree";
  }
  return "?";
}

struct Violation {
  ConstraintKind kind;
  NodeIndex i = 0;
  NodeIndex j = 0;  // equals i for degree violations
  int slot = 0;

  std::string describe() const {
    std::string s = std::string(to_string(kind)) + " violation at node " + std::to_string(i + 1);
    if (kind != ConstraintKind::degree) s += "-" + std::to_string(j + 1);
    return s + ", slot " + std::to_string(slot + 1);
  }
};

// Checks binarity, symmetry, visibility and the one-link-per-slot rule. Pair
// violations are reported once per unordered pair and slot.
inline std::vector<Violation> validate_topology(const TopologySchedule& x, const ScenarioState& state) {
  if (x.node_count() != state.node_count() || x.slot_count() != state.slot_count()) {
    throw ValidationError("schedule is " + std::to_string(x.node_count()) + " nodes x " +
                          std::to_string(x.slot_count()) + " slots, state is " +
                          std::to_string(state.node_count()) + " x " +
                          std::to_string(state.slot_count()));
  }
  std::vector<Violation> out;
  const std::size_t n = x.node_count();
  for (int t = 0; t < x.slot_count(); ++t) {
    for (NodeIndex i = 0; i < n; ++i) {
      for (NodeIndex j = i; j < n; ++j) {
        std::uint8_t a = x.at(i, j, t), b = x.at(j, i, t);
        if (a > 1 || b > 1) out.push_back({ConstraintKind::binary, i, j, t});
        if (a != b) out.push_back({ConstraintKind::symmetry, i, j, t});
        if ((a || b) && !state.visible(i, j)) out.push_back({ConstraintKind::visibility, i, j, t});
      }
    }
    for (NodeIndex i = 0; i < n; ++i) {
      int degree = 0;
      for (NodeIndex j = 0; j < n; ++j) degree += x.at(i, j, t);
      if (degree > 1) out.push_back({ConstraintKind::degree, i, i, t});
    }
  }
  return out;
}

struct RangingAudit {
  std::vector<int> partners;       // distinct satellite partners per node, 0 for ground
  std::vector<bool> satisfied;     // per node, true for ground nodes
  bool pass = true;
  int worst = 0;                   // minimum partner count over satellites
};

// Counts distinct satellite partners over the whole state. Links to ground
// antennas never count.
inline RangingAudit ranging_audit(const TopologySchedule& x, const ScenarioState& state, int l_min) {
  RangingAudit audit;
  const std::size_t n = state.node_count();
  audit.partners.assign(n, 0);
  audit.satisfied.assign(n, true);
  audit.worst = state.satellites().empty() ? 0 : x.slot_count() * static_cast<int>(n);
  for (NodeIndex i : state.satellites()) {
    int count = 0;
    for (NodeIndex j : state.satellites()) {
      if (i == j) continue;
      for (int t = 0; t < x.slot_count(); ++t) {
        if (x.at(i, j, t)) {
          ++count;
          break;
        }
      }
    }
    audit.partners[i] = count;
    audit.satisfied[i] = count >= l_min;
    audit.pass = audit.pass && audit.satisfied[i];
    audit.worst = std::min(audit.worst, count);
  }
  return audit;
}

}  // namespace gnsstopo
