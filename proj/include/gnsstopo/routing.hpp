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

// Restricted store-carry-forward routing shared by the exact solver and the
// simulator. Packets move only non-anchor -> anchor and anchor -> ground,
// oldest generation slot first (ties by source index).

#pragma once

#include <algorithm>
#include <vector>

#include "gnsstopo/scenario.hpp"

namespace gnsstopo {

// Packets sharing a generation slot and source.
struct Lot {
  int gen = 0;
  NodeIndex source = 0;
  Packets count = 0;

  bool same_key(const Lot& o) const { return gen == o.gen && source == o.source; }
  bool older_than(const Lot& o) const { return gen != o.gen ? gen < o.gen : source < o.source; }
};

struct Transfer {
  NodeIndex from = 0;
  NodeIndex to = 0;
  Lot lot;
};

// Per-node queues kept sorted oldest first.
class BufferSet {
 public:
  BufferSet() = default;
  explicit BufferSet(std::size_t nodes) : queues_(nodes), sizes_(nodes, 0) {}

  std::size_t node_count() const { return queues_.size(); }
  Packets size(NodeIndex i) const { return sizes_[i]; }
  const std::vector<Lot>& queue(NodeIndex i) const { return queues_[i]; }

  Packets total() const {
    Packets s = 0;
    for (Packets p : sizes_) s += p;
    return s;
  }

  void add(NodeIndex i, const Lot& lot) {
    if (lot.count <= 0) return;
    auto& q = queues_[i];
    auto it = std::lower_bound(q.begin(), q.end(), lot, [](const Lot& a, const Lot& b) { return a.older_than(b); });
    if (it != q.end() && it->same_key(lot)) {
      it->count += lot.count;
    } else {
      q.insert(it, lot);
    }
    sizes_[i] += lot.count;
  }

  // Removes up to `amount` packets from the front of node i's queue.
  std::vector<Lot> take_oldest(NodeIndex i, Packets amount) {
    std::vector<Lot> out;
    auto& q = queues_[i];
    std::size_t k = 0;
    while (amount > 0 && k < q.size()) {
      Lot& front = q[k];
      Packets n = std::min(amount, front.count);
      out.push_back({front.gen, front.source, n});
      front.count -= n;
      amount -= n;
      sizes_[i] -= n;
      if (front.count == 0) ++k;
    }
    q.erase(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
  }

  // Sum over buffered packets of (now - gen).
  Packets age_weighted(int now) const {
    Packets s = 0;
    for (const auto& q : queues_)
      for (const Lot& l : q) s += static_cast<Packets>(now - l.gen) * l.count;
    return s;
  }

  friend bool operator==(const BufferSet& a, const BufferSet& b) {
    if (a.sizes_ != b.sizes_) return false;
    for (std::size_t i = 0; i < a.queues_.size(); ++i) {
      const auto &x = a.queues_[i], &y = b.queues_[i];
      if (x.size() != y.size()) return false;
      for (std::size_t k = 0; k < x.size(); ++k)
        if (!x[k].same_key(y[k]) || x[k].count != y[k].count) return false;
    }
    return true;
  }

 private:
  std::vector<std::vector<Lot>> queues_;
  std::vector<Packets> sizes_;
};

// Applies one slot: `generated[i]` packets appear at each satellite, then
// each link moves traffic. An anchor receives no more than it can hold under
// b_max; everything else is limited by link capacity and queue contents.
// Transfers into ground nodes are deliveries and leave the buffers.
inline std::vector<Transfer> route_slot(const ScenarioState& state, const SystemParams& params, BufferSet& buffers,
                                        const std::vector<Edge>& links, int gen_label,
                                        const std::vector<Packets>& generated) {
  for (NodeIndex i : state.satellites())
    if (generated[i] > 0) buffers.add(i, {gen_label, i, generated[i]});
  std::vector<Transfer> moves;
  for (const Edge& e : links) {
    NodeIndex from = e.u, to = e.v;
    Packets amount = 0;
    switch (classify_edge(state, e.u, e.v)) {
      case EdgeClass::na:
        if (state.role(from) != NodeRole::non_anchor) std::swap(from, to);
        amount = std::min({params.c_ss, buffers.size(from), std::max<Packets>(0, params.b_max - buffers.size(to))});
        break;
      case EdgeClass::ag:
        if (state.role(from) != NodeRole::anchor) std::swap(from, to);
        amount = std::min(params.c_sg, buffers.size(from));
        break;
      default:
        continue;
    }
    for (const Lot& lot : buffers.take_oldest(from, amount)) {
      moves.push_back({from, to, lot});
      if (state.is_satellite(to)) buffers.add(to, lot);
    }
  }
  return moves;
}

}  // namespace gnsstopo
