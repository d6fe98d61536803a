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

// Exact search for the two link-scheduling models at desk scale.
//
// Both models are fully determined by the per-slot matchings: given links,
// routing follows the oldest-first rule and window indicators follow the
// access pattern. The search is depth-first over slots, one child per
// matching of the link candidates, with children tried in order of their
// bound. Partial schedules that reach an identical search state (buffers or
// access runs, plus the ranging partners seen so far) at no lower cost are
// discarded.

#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gnsstopo/ilp_exact.hpp"
#include "gnsstopo/ilp_model.hpp"
#include "gnsstopo/railp.hpp"
#include "gnsstopo/routing.hpp"
#include "gnsstopo/scenario.hpp"

namespace gnsstopo {

struct BnbOptions {
  double time_budget_seconds = 300;
  // Among equal-objective schedules of the exact model, prefer the one with
  // the smaller total buffered volume.
  bool secondary_volume = true;
  std::size_t max_matchings_per_slot = 100000;
  std::size_t max_memo_entries = 4000000;
};

using SlotMatching = std::vector<Edge>;

inline bool is_maximal(const SlotMatching& m, std::size_t nodes, const std::vector<Edge>& edges) {
  std::vector<bool> used(nodes, false);
  for (const Edge& e : m) used[e.u] = used[e.v] = true;
  for (const Edge& e : edges)
    if (!used[e.u] && !used[e.v]) return false;
  return true;
}

// Every matching of `edges` (the empty one included), each sorted, in
// lexicographic order of their edge lists.
inline std::vector<SlotMatching> enumerate_matchings(std::size_t nodes, const std::vector<Edge>& edges,
                                                     std::size_t limit = std::numeric_limits<std::size_t>::max()) {
  std::vector<std::vector<NodeIndex>> adj(nodes);
  for (const Edge& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<SlotMatching> out;
  std::vector<bool> used(nodes, false);
  SlotMatching cur;
  std::function<void(NodeIndex)> rec = [&](NodeIndex v) {
    while (v < nodes && used[v]) ++v;
    if (v >= nodes) {
      if (out.size() >= limit) throw std::length_error("too many matchings per slot for the exact solver");
      SlotMatching m = cur;
      std::sort(m.begin(), m.end());
      out.push_back(std::move(m));
      return;
    }
    used[v] = true;
    rec(v + 1);
    for (NodeIndex u : adj[v]) {
      if (used[u]) continue;
      used[u] = true;
      cur.push_back(make_edge(v, u));
      rec(v + 1);
      cur.pop_back();
      used[u] = false;
    }
    used[v] = false;
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

class Deadline {
 public:
  explicit Deadline(double seconds)
      : start_(std::chrono::steady_clock::now()), limit_(seconds) {}
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  bool expired() {
    if (++calls_ % 256 != 0) return expired_;
    expired_ = elapsed() > limit_;
    return expired_;
  }
  bool hit() const { return expired_; }

 private:
  std::chrono::steady_clock::time_point start_;
  double limit_;
  std::uint64_t calls_ = 0;
  bool expired_ = false;
};

// Distinct satellite partners per satellite, as bit sets.
struct RangingState {
  std::vector<std::uint64_t> partners;

  void add(const ScenarioState& s, const SlotMatching& m) {
    for (const Edge& e : m) {
      if (s.is_satellite(e.u) && s.is_satellite(e.v)) {
        partners[e.u] |= std::uint64_t{1} << e.v;
        partners[e.v] |= std::uint64_t{1} << e.u;
      }
    }
  }
};

// True when every satellite can still reach l_min partners with
// `remaining` slots left.
inline bool ranging_reachable(const ScenarioState& s, const RangingState& r, int l_min, int remaining,
                              const std::vector<std::uint64_t>& visible_sats) {
  for (NodeIndex i : s.satellites()) {
    int have = std::popcount(r.partners[i]);
    int need = l_min - have;
    if (need <= 0) continue;
    if (need > remaining) return false;
    if (need > std::popcount(visible_sats[i] & ~r.partners[i])) return false;
  }
  return true;
}

// Maximum bipartite matching size between `left` and `right` over
// visibility; small sets, simple augmenting paths.
inline int bipartite_matching_size(const ScenarioState& s, const std::vector<NodeIndex>& left,
                                   const std::vector<NodeIndex>& right) {
  std::vector<int> match_right(right.size(), -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t l, std::vector<bool>& seen) {
    for (std::size_t r = 0; r < right.size(); ++r) {
      if (!s.visible(left[l], right[r]) || seen[r]) continue;
      seen[r] = true;
      if (match_right[r] < 0 || augment(static_cast<std::size_t>(match_right[r]), seen)) {
        match_right[r] = static_cast<int>(l);
        return true;
      }
    }
    return false;
  };
  int size = 0;
  for (std::size_t l = 0; l < left.size(); ++l) {
    std::vector<bool> seen(right.size(), false);
    size += augment(l, seen);
  }
  return size;
}

struct VectorHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Search engine shared by both models. `Node` carries the model-specific
// state; the callbacks expand a node by one slot and bound it.
template <class Node>
struct SearchResult {
  bool found = false;
  std::vector<SlotMatching> best;
  double best_cost = std::numeric_limits<double>::infinity();
  double bound = 0;  // valid lower bound on the optimal cost
  std::vector<IncumbentEvent> incumbents;
  std::uint64_t nodes = 0;
  bool timed_out = false;
};

template <class Node, class Expand, class Key>
SearchResult<Node> depth_first(const ScenarioState& state, const SystemParams& params,
                               const std::vector<SlotMatching>& matchings, const Node& root, Expand expand, Key key,
                               const BnbOptions& opt, Deadline& clock) {
  // expand(node, slot, matching, child&, child_bound&) -> bool feasible
  SearchResult<Node> res;
  const int T = state.slot_count();
  std::vector<std::uint64_t> visible_sats(state.node_count(), 0);
  if (state.node_count() > 64) throw std::length_error("exact solver supports at most 64 nodes");
  for (NodeIndex i : state.satellites())
    for (NodeIndex j : state.satellites())
      if (i != j && state.visible(i, j)) visible_sats[i] |= std::uint64_t{1} << j;

  std::unordered_map<std::vector<std::int64_t>, double, VectorHash> memo;
  std::vector<SlotMatching> path;
  double open_bound = std::numeric_limits<double>::infinity();
  const double eps = 1e-9;

  struct Child {
    double bound;
    std::size_t order;
    Node node;
    RangingState ranging;
    std::vector<std::int64_t> key;
    std::vector<std::uint64_t> reach;  // partner sets, all ones once satisfied
    bool dropped = false;
  };

  std::function<void(const Node&, const RangingState&, int)> visit = [&](const Node& node,
                                                                          const RangingState& ranging, int t) {
    ++res.nodes;
    if (t == T) {
      for (NodeIndex i : state.satellites())
        if (std::popcount(ranging.partners[i]) < params.l_min) return;
      double cost = node.cost;
      if (!res.found || cost < res.best_cost - eps) {
        res.found = true;
        res.best_cost = cost;
        res.best = path;
        res.incumbents.push_back({clock.elapsed(), cost});
      }
      return;
    }
    std::vector<Child> children;
    std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, VectorHash> groups;
    for (std::size_t k = 0; k < matchings.size(); ++k) {
      Child c{0, k, Node{}, ranging, {}, {}};
      if (!expand(node, t, matchings[k], c.node, c.bound)) continue;
      c.ranging.add(state, matchings[k]);
      if (!ranging_reachable(state, c.ranging, params.l_min, T - t - 1, visible_sats)) continue;
      if (res.found && c.bound >= res.best_cost - eps) continue;
      c.key = key(c.node, t + 1);
      for (std::uint64_t p : c.ranging.partners)
        c.reach.push_back(std::popcount(p) >= params.l_min ? ~std::uint64_t{0} : p);
      // A sibling reaching the same state at no higher cost with at least
      // the same partners makes this child redundant, and vice versa.
      auto& group = groups[c.key];
      bool dominated = false;
      for (std::size_t other : group) {
        Child& o = children[other];
        if (o.dropped) continue;
        bool o_covers = o.node.cost <= c.node.cost + eps;
        bool c_covers = c.node.cost <= o.node.cost + eps;
        for (std::size_t i = 0; i < c.reach.size() && (o_covers || c_covers); ++i) {
          o_covers = o_covers && (o.reach[i] & c.reach[i]) == c.reach[i];
          c_covers = c_covers && (o.reach[i] & c.reach[i]) == o.reach[i];
        }
        if (o_covers) {
          dominated = true;
          break;
        }
        if (c_covers) o.dropped = true;
      }
      if (dominated) continue;
      group.push_back(children.size());
      children.push_back(std::move(c));
    }
    std::erase_if(children, [](const Child& c) { return c.dropped; });
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) { return a.bound < b.bound; });
    for (std::size_t idx = 0; idx < children.size(); ++idx) {
      Child& c = children[idx];
      if (res.found && c.bound >= res.best_cost - eps) break;
      if (clock.expired()) {
        open_bound = std::min(open_bound, c.bound);
        return;
      }
      // Once a satellite meets the ranging target its partner set no longer
      // constrains the future.
      std::vector<std::int64_t> k = std::move(c.key);
      for (std::uint64_t p : c.reach) k.push_back(static_cast<std::int64_t>(p));
      auto it = memo.find(k);
      if (it != memo.end() && it->second <= c.node.cost + eps) continue;
      if (it != memo.end()) {
        it->second = c.node.cost;
      } else if (memo.size() < opt.max_memo_entries) {
        memo.emplace(std::move(k), c.node.cost);
      }
      path.push_back(matchings[c.order]);
      visit(c.node, c.ranging, t + 1);
      path.pop_back();
      if (clock.hit()) {
        open_bound = std::min(open_bound, c.bound);
        for (std::size_t rest = idx + 1; rest < children.size(); ++rest)
          open_bound = std::min(open_bound, children[rest].bound);
        return;
      }
    }
  };

  RangingState r0{std::vector<std::uint64_t>(state.node_count(), 0)};
  if (ranging_reachable(state, r0, params.l_min, T, visible_sats)) visit(root, r0, 0);
  res.timed_out = clock.hit();
  res.bound = res.timed_out ? std::min(open_bound, res.best_cost) : res.best_cost;
  return res;
}

inline TopologySchedule schedule_from_path(const ScenarioState& state, const std::vector<SlotMatching>& path) {
  TopologySchedule x(state.node_count(), state.slot_count());
  for (int t = 0; t < static_cast<int>(path.size()); ++t)
    for (const Edge& e : path[t]) x.link(e.u, e.v, t);
  return x;
}

// Exact model node: buffers after the last fixed slot and the cost so far.
struct IlpNode {
  BufferSet buffers;
  double cost = 0;
};

// Admissible bound on the cost still to come after slot `t`: a tandem of
// two pooled queues (packets at non-anchors, packets at anchors) drained
// oldest first at the largest per-slot rates the visibility graph allows.
class PooledBound {
 public:
  PooledBound(const ScenarioState& s, const TrafficProfile& f, const SystemParams& p, bool volume, double scale)
      : state_(s), traffic_(f), volume_(volume), scale_(scale) {
    rate_na_ = p.c_ss * bipartite_matching_size(s, s.non_anchors(), s.anchors());
    rate_ag_ = p.c_sg * bipartite_matching_size(s, s.anchors(), s.ground_nodes());
  }

  double operator()(const BufferSet& b, int t) const {
    const int T = state_.slot_count();
    std::vector<Packets> low(T, 0), high(T, 0);  // indexed by generation slot
    for (NodeIndex i : state_.satellites()) {
      auto& pool = state_.role(i) == NodeRole::anchor ? high : low;
      for (const Lot& l : b.queue(i)) pool[l.gen] += l.count;
    }
    double age = 0, vol = 0;
    for (int tau = t; tau < T; ++tau) {
      for (NodeIndex i : state_.satellites())
        (state_.role(i) == NodeRole::anchor ? high : low)[tau] += traffic_.packets(i, tau);
      drain(high, rate_ag_, nullptr);
      std::vector<Packets> moved(T, 0);
      drain(low, rate_na_, &moved);
      for (int g = 0; g < T; ++g) high[g] += moved[g];
      for (int g = 0; g <= tau; ++g) {
        Packets n = low[g] + high[g];
        age += static_cast<double>(tau - g) * static_cast<double>(n);
        vol += static_cast<double>(n);
      }
    }
    return volume_ ? age * scale_ + vol : age;
  }

 private:
  static void drain(std::vector<Packets>& pool, Packets cap, std::vector<Packets>* into) {
    for (std::size_t g = 0; g < pool.size() && cap > 0; ++g) {
      Packets n = std::min(cap, pool[g]);
      pool[g] -= n;
      cap -= n;
      if (into) (*into)[g] += n;
    }
  }

  const ScenarioState& state_;
  const TrafficProfile& traffic_;
  Packets rate_na_ = 0, rate_ag_ = 0;
  bool volume_;
  double scale_;
};

inline IlpSolution solve_exact_ilp(const IlpModel& model, const BnbOptions& opt) {
  const auto& src = *model.source;
  const auto& state = src.state;
  const auto& traffic = src.traffic;
  const auto& params = src.params;
  const int T = state.slot_count();
  Deadline clock(opt.time_budget_seconds);
  auto matchings = enumerate_matchings(state.node_count(), state.link_candidates(), opt.max_matchings_per_slot);

  // Secondary volume term fits under one unit of the primary objective.
  double total = static_cast<double>(traffic.total());
  double scale = total * std::max(T, 1) + 1;
  bool volume = opt.secondary_volume && total * T * T * scale < 4e15;
  PooledBound lb(state, traffic, params, volume, scale);

  auto expand = [&](const IlpNode& node, int t, const SlotMatching& m, IlpNode& child, double& bound) {
    child.buffers = node.buffers;
    std::vector<Packets> gen(state.node_count());
    for (NodeIndex i = 0; i < state.node_count(); ++i) gen[i] = traffic.packets(i, t);
    route_slot(state, params, child.buffers, m, t, gen);
    for (NodeIndex i : state.satellites())
      if (child.buffers.size(i) > params.b_max) return false;
    double age = static_cast<double>(child.buffers.age_weighted(t));
    double vol = static_cast<double>(child.buffers.total());
    child.cost = node.cost + (volume ? age * scale + vol : age);
    bound = child.cost + lb(child.buffers, t + 1);
    return true;
  };
  auto key = [&](const IlpNode& node, int t) {
    std::vector<std::int64_t> k{t};
    for (NodeIndex i : state.satellites()) {
      k.push_back(-1);
      for (const Lot& l : node.buffers.queue(i)) {
        k.push_back(l.gen);
        k.push_back(static_cast<std::int64_t>(l.source));
        k.push_back(l.count);
      }
    }
    return k;
  };
  IlpNode root{BufferSet(state.node_count()), 0};
  auto res = depth_first(state, params, matchings, root, expand, key, opt, clock);

  IlpSolution sol;
  sol.nodes_explored = res.nodes;
  sol.seconds = clock.elapsed();
  auto primary = [&](double c) { return volume ? std::floor(c / scale) : c; };
  for (auto ev : res.incumbents) sol.incumbents.push_back({ev.seconds, primary(ev.objective)});
  if (!res.found) {
    sol.status = res.timed_out ? SolveStatus::timeout : SolveStatus::infeasible;
    sol.bound = res.timed_out ? primary(res.bound) : std::numeric_limits<double>::infinity();
    return sol;
  }
  TopologySchedule x = schedule_from_path(state, res.best);
  sol.values = ilp_assignment(model, x);
  auto bad = check_assignment(model, sol.values);
  if (!bad.empty()) throw std::logic_error("exact solver produced an infeasible point: " + bad.front());
  sol.objective_value = model.evaluate_objective(sol.values);
  sol.status = res.timed_out ? SolveStatus::feasible_timeout : SolveStatus::optimal;
  sol.bound = res.timed_out ? std::min(primary(res.bound), sol.objective_value) : sol.objective_value;
  return sol;
}

// Minimum-cost assignment of every row to a distinct column (rows <= cols).
inline double min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return 0;
  const std::size_t m = cost.front().size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(m + 1, 0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0;
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j]) total += cost[p[j] - 1][j - 1];
  return total;
}

// Lower bound on the weighted zeros still to be closed for one family of
// access-pattern rows, given the open run of each row and R slots left. At
// most `capacity` rows of the family can see an access in one slot.
class RunBound {
 public:
  RunBound(std::vector<double> weight, std::vector<bool> reachable, int capacity)
      : weight_(std::move(weight)), reachable_(std::move(reachable)), capacity_(capacity) {}

  std::size_t size() const { return weight_.size(); }
  int capacity() const { return capacity_; }

  // Lower bound without regard to other families.
  double operator()(const std::vector<int>& run, std::size_t offset, int R) const {
    if (weight_.empty()) return 0;
    if (R == 0) return closed(run, offset);
    auto by_budget = access_budget(run, offset, R);
    return std::max(first_access(run, offset, R), by_budget.back());
  }

  // Weighted zeros when every open run closes now.
  double closed(const std::vector<int>& run, std::size_t offset) const {
    double s = 0;
    for (std::size_t r = 0; r < weight_.size(); ++r) s += weight_[r] * tri(run[offset + r]);
    return s;
  }

  // Each row pays for its open run up to its first access; first accesses
  // per slot are limited by the capacity.
  double first_access(const std::vector<int>& run, std::size_t offset, int R) const {
    const std::size_t n = weight_.size();
    if (n == 0) return 0;
    if (R == 0) return closed(run, offset);
    const int per_slot = std::min<int>(capacity_, static_cast<int>(n));
    const double inf = 1e18;
    std::vector<std::vector<double>> cost(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double z = run[offset + r];
      for (int s = 1; s <= R; ++s)
        for (int c = 0; c < per_slot; ++c) cost[r].push_back(reachable_[r] ? weight_[r] * tri(z + s - 1) : inf);
      for (std::size_t k = 0; k < n; ++k) cost[r].push_back(weight_[r] * tri(z + R));
    }
    return min_cost_assignment(cost);
  }

  // Entry b: least weighted zeros when the family gets at most b accesses
  // over the remaining slots (b up to capacity * R). Non-increasing.
  std::vector<double> access_budget(const std::vector<int>& run, std::size_t offset, int R) const {
    const std::size_t n = weight_.size();
    const int budget = std::min<int>(capacity_ * R, static_cast<int>(n) * R);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(budget + 1, 0);
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<double> next(budget + 1, inf);
      const int kmax = reachable_[r] ? R : 0;
      for (int k = 0; k <= kmax; ++k) {
        double f = weight_[r] * spread(run[offset + r], R, k);
        for (int b = k; b <= budget; ++b)
          if (best[b - k] + f < next[b]) next[b] = best[b - k] + f;
      }
      best = std::move(next);
    }
    for (std::size_t b = 1; b < best.size(); ++b) best[b] = std::min(best[b], best[b - 1]);
    return best;
  }

 private:
  static double tri(double k) { return k * (k + 1) / 2; }

  // Least zero-run cost with k accesses in R slots after an open run of z.
  static double spread(int z, int R, int k) {
    std::vector<int> len(k + 1, 0);
    len[0] = z;
    for (int zeros = R - k; zeros > 0; --zeros) ++*std::min_element(len.begin(), len.end());
    double s = 0;
    for (int l : len) s += tri(l);
    return s;
  }

  std::vector<double> weight_;
  std::vector<bool> reachable_;
  int capacity_;
};

// Window model node: open zero-run length per pattern row and the weighted
// zeros already closed.
struct RailpNode {
  std::vector<int> run;
  double cost = 0;  // weighted closed zeros
};

inline IlpSolution solve_exact_railp(const IlpModel& model, const BnbOptions& opt) {
  const auto& src = *model.source;
  const auto& state = src.state;
  const auto& params = src.params;
  const int T = state.slot_count();
  Deadline clock(opt.time_budget_seconds);
  auto matchings = enumerate_matchings(state.node_count(), state.link_candidates(), opt.max_matchings_per_slot);

  // Adding a link never removes an access or a ranging partner, so maximal
  // matchings suffice for this model.
  {
    const auto candidates = state.link_candidates();
    std::erase_if(matchings, [&](const SlotMatching& m) { return !is_maximal(m, state.node_count(), candidates); });
  }

  // Row r < N^n is a non-anchor, the rest are anchors.
  std::vector<NodeIndex> rows = state.non_anchors();
  rows.insert(rows.end(), state.anchors().begin(), state.anchors().end());
  const std::size_t nn = state.non_anchors().size();
  std::vector<double> weight(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    weight[r] = (r < nn ? params.gamma : 1 - params.gamma) * static_cast<double>(src.traffic.packets(rows[r], 0));
  std::vector<int> row_of(state.node_count(), -1);
  for (std::size_t r = 0; r < rows.size(); ++r) row_of[rows[r]] = static_cast<int>(r);

  auto family = [&](std::size_t from, std::size_t to, NodeRole target, int capacity) {
    std::vector<double> w(weight.begin() + from, weight.begin() + to);
    std::vector<bool> reach;
    for (std::size_t r = from; r < to; ++r) {
      bool any = false;
      for (NodeIndex j = 0; j < state.node_count(); ++j) any = any || (state.visible(rows[r], j) && state.role(j) == target);
      reach.push_back(any);
    }
    return RunBound(std::move(w), std::move(reach), capacity);
  };
  const RunBound na_bound = family(0, nn, NodeRole::anchor,
                                   bipartite_matching_size(state, state.non_anchors(), state.anchors()));
  const RunBound ag_bound = family(nn, rows.size(), NodeRole::ground,
                                   bipartite_matching_size(state, state.anchors(), state.ground_nodes()));
  // Every access, towards an anchor or from one, occupies a distinct anchor
  // in its slot, so the two families share N^a accesses per slot.
  const int anchor_slots = static_cast<int>(state.anchors().size());
  auto joint_bound = [&](const std::vector<int>& run, int R) {
    if (R == 0) return na_bound.closed(run, 0) + ag_bound.closed(run, nn);
    const double fa_na = na_bound.first_access(run, 0, R);
    const double fa_ag = ag_bound.first_access(run, nn, R);
    const auto g_na = na_bound.access_budget(run, 0, R);
    const auto g_ag = ag_bound.access_budget(run, nn, R);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < g_na.size(); ++a) {
      const long long rest = static_cast<long long>(anchor_slots) * R - static_cast<long long>(a);
      if (rest < 0) break;
      const double ag = g_ag[std::min<std::size_t>(g_ag.size() - 1, static_cast<std::size_t>(rest))];
      best = std::min(best, std::max(fa_na, g_na[a]) + std::max(fa_ag, ag));
    }
    return best;
  };
  std::unordered_map<std::vector<std::int64_t>, double, VectorHash> bound_cache;
  auto tri = [](double k) { return k * (k + 1) / 2; };
  auto expand = [&](const RailpNode& node, int t, const SlotMatching& m, RailpNode& child, double& bound) {
    child.run = node.run;
    child.cost = node.cost;
    std::vector<bool> access(rows.size(), false);
    for (const Edge& e : m) {
      EdgeClass c = classify_edge(state, e.u, e.v);
      if (c == EdgeClass::na || c == EdgeClass::ag) {
        NodeIndex low = c == EdgeClass::na ? (state.role(e.u) == NodeRole::non_anchor ? e.u : e.v)
                                           : (state.role(e.u) == NodeRole::anchor ? e.u : e.v);
        access[row_of[low]] = true;
      }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (access[r]) {
        child.cost += weight[r] * tri(child.run[r]);
        child.run[r] = 0;
      } else {
        ++child.run[r];
      }
    }
    std::vector<std::int64_t> k(child.run.begin(), child.run.end());
    k.push_back(t);
    auto hit = bound_cache.find(k);
    if (hit == bound_cache.end()) {
      const int left = T - t - 1;
      hit = bound_cache.emplace(std::move(k), joint_bound(child.run, left)).first;
    }
    bound = child.cost + hit->second;
    return true;
  };
  auto key = [&](const RailpNode& node, int t) {
    std::vector<std::int64_t> k{t};
    k.insert(k.end(), node.run.begin(), node.run.end());
    return k;
  };
  RailpNode root{std::vector<int>(rows.size(), 0), 0};
  // Leaves must include the still-open runs in their cost.
  auto expand_final = [&](const RailpNode& node, int t, const SlotMatching& m, RailpNode& child, double& bound) {
    expand(node, t, m, child, bound);
    if (t == T - 1) child.cost = bound;  // no slots left: the bound is exact
    return true;
  };
  auto res = depth_first(state, params, matchings, root, expand_final, key, opt, clock);

  const double windows = static_cast<double>(T) * (T + 1) / 2;
  double best_possible = 0;
  for (double w : weight) best_possible += w * windows;
  IlpSolution sol;
  sol.nodes_explored = res.nodes;
  sol.seconds = clock.elapsed();
  for (auto ev : res.incumbents) sol.incumbents.push_back({ev.seconds, best_possible - ev.objective});
  if (!res.found) {
    sol.status = res.timed_out ? SolveStatus::timeout : SolveStatus::infeasible;
    sol.bound = res.timed_out ? best_possible - res.bound : -std::numeric_limits<double>::infinity();
    return sol;
  }
  TopologySchedule x = schedule_from_path(state, res.best);
  sol.values = railp_assignment(model, x);
  auto bad = check_assignment(model, sol.values);
  if (!bad.empty()) throw std::logic_error("exact solver produced an infeasible point: " + bad.front());
  sol.objective_value = model.evaluate_objective(sol.values);
  sol.status = res.timed_out ? SolveStatus::feasible_timeout : SolveStatus::optimal;
  sol.bound = res.timed_out ? best_possible - res.bound : sol.objective_value;
  return sol;
}

}  // namespace detail

// Solves a model produced by build_ilp or build_railp.
inline IlpSolution solve_branch_and_bound(const IlpModel& model, const BnbOptions& opt = {}) {
  if (!model.source) throw std::invalid_argument("the internal solver needs a model built from a scenario");
  model.source->params.validate(model.source->state.slot_count());
  if (model.source->kind == ModelKind::ilp) return detail::solve_exact_ilp(model, opt);
  return detail::solve_exact_railp(model, opt);
}

inline IlpSolution solve_branch_and_bound(const IlpModel& model, double time_budget_seconds) {
  BnbOptions opt;
  opt.time_budget_seconds = time_budget_seconds;
  return solve_branch_and_bound(model, opt);
}

}  // namespace gnsstopo
