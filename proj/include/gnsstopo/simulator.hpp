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

// Store-carry-forward evaluation of a schedule. The state's schedule is
// replayed `repetitions` times back to back with buffers carried over;
// slot g of the run is slot g % T of the schedule.

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "gnsstopo/routing.hpp"
#include "gnsstopo/scenario.hpp"

namespace gnsstopo {

struct SimOptions {
  int repetitions = 1;
  // Count packets still buffered at the end as delivered right after the
  // horizon when averaging.
  bool horizon_penalty = false;
};

// A batch of packets with identical fate.
struct PacketRecord {
  NodeIndex source = 0;
  int generated_slot = 0;   // global slot, 0-based
  int delivered_slot = -1;  // -1 when still buffered at the horizon
  Packets count = 0;

  bool censored() const { return delivered_slot < 0; }
  int delay() const { return delivered_slot - generated_slot; }
};

struct SlotLedger {
  int slot = 0;
  Packets generated = 0;   // cumulative
  Packets delivered = 0;   // cumulative
  Packets buffered = 0;    // at the end of the slot
};

struct BufferViolation {
  NodeIndex node = 0;
  int slot = 0;
  Packets size = 0;
};

struct EvaluationReport {
  std::string scenario;
  std::string algorithm;
  int state_index = 0;
  int repetitions = 1;
  Packets generated = 0;
  Packets delivered = 0;
  Packets undelivered = 0;
  double average_delay_slots = 0;
  Packets averaged = 0;  // packets behind average_delay_slots
  double average_delay_non_anchor = 0;
  double average_delay_anchor = 0;
  int max_delay = 0;
  std::map<int, Packets> delay_histogram;  // delivered packets per delay
  std::vector<Packets> buffer_peak;        // per node
  std::vector<bool> ranging_pass;          // per node, true for ground nodes
  std::vector<int> ranging_partners;
  bool ranging_ok = true;
  double ranging_pass_rate = 1;  // share of satellites meeting L^min
  std::vector<BufferViolation> violations;
  std::vector<SlotLedger> ledger;
  Packets age_weighted_buffer = 0;  // sum over slots of buffered packets times their age
  Packets buffered_volume = 0;      // sum over slots of buffered packets
  std::map<std::string, double> runtime_ms;
  std::vector<PacketRecord> packets;

  // Fraction of generated packets delivered within each delay, non-decreasing;
  // the last value is the delivered fraction.
  std::vector<std::pair<int, double>> cdf() const {
    std::vector<std::pair<int, double>> out;
    Packets acc = 0;
    for (auto [d, n] : delay_histogram) {
      acc += n;
      out.emplace_back(d, generated ? static_cast<double>(acc) / static_cast<double>(generated) : 0.0);
    }
    return out;
  }

  bool conserved() const {
    for (const auto& l : ledger)
      if (l.generated != l.delivered + l.buffered) return false;
    return generated == delivered + undelivered;
  }
};

namespace detail {

inline void finish_averages(EvaluationReport& r, const ScenarioState* state, bool horizon_penalty, int horizon) {
  double sum = 0, n = 0, sum_a = 0, n_a = 0, sum_n = 0, n_n = 0;
  r.delay_histogram.clear();
  r.max_delay = 0;
  for (const PacketRecord& p : r.packets) {
    double d;
    if (p.censored()) {
      if (!horizon_penalty) continue;
      d = horizon - p.generated_slot;
    } else {
      d = p.delay();
      r.delay_histogram[p.delay()] += p.count;
      r.max_delay = std::max(r.max_delay, p.delay());
    }
    const double c = static_cast<double>(p.count);
    sum += d * c;
    n += c;
    if (state && state->role(p.source) == NodeRole::anchor) {
      sum_a += d * c;
      n_a += c;
    } else {
      sum_n += d * c;
      n_n += c;
    }
  }
  r.average_delay_slots = n ? sum / n : 0;
  r.averaged = static_cast<Packets>(n);
  r.average_delay_anchor = n_a ? sum_a / n_a : 0;
  r.average_delay_non_anchor = n_n ? sum_n / n_n : 0;
}

}  // namespace detail

inline EvaluationReport simulate(const ScenarioState& state, const TopologySchedule& x, const TrafficProfile& traffic,
                                 const SystemParams& params, const SimOptions& opt = {}) {
  if (opt.repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  auto bad = validate_topology(x, state);
  if (!bad.empty()) throw ValidationError("cannot simulate invalid schedule: " + bad.front().describe());
  const int T = state.slot_count();
  const std::size_t n = state.node_count();
  EvaluationReport r;
  r.state_index = state.index();
  r.repetitions = opt.repetitions;
  r.buffer_peak.assign(n, 0);
  BufferSet buffers(n);
  std::vector<Packets> gen(n);
  std::vector<std::vector<Edge>> links(T);
  for (int t = 0; t < T; ++t) links[t] = x.links(t);

  for (int rep = 0; rep < opt.repetitions; ++rep) {
    for (int t = 0; t < T; ++t) {
      const int g = rep * T + t;
      for (NodeIndex i = 0; i < n; ++i) {
        gen[i] = state.is_satellite(i) ? traffic.packets(i, t) : 0;
        r.generated += gen[i];
      }
      for (const Transfer& mv : route_slot(state, params, buffers, links[t], g, gen)) {
        if (state.is_satellite(mv.to)) continue;
        r.packets.push_back({mv.lot.source, mv.lot.gen, g, mv.lot.count});
        r.delivered += mv.lot.count;
      }
      for (NodeIndex i : state.satellites()) {
        r.buffer_peak[i] = std::max(r.buffer_peak[i], buffers.size(i));
        if (buffers.size(i) > params.b_max) r.violations.push_back({i, g, buffers.size(i)});
      }
      r.age_weighted_buffer += buffers.age_weighted(g);
      r.buffered_volume += buffers.total();
      r.ledger.push_back({g, r.generated, r.delivered, buffers.total()});
    }
  }
  for (NodeIndex i : state.satellites())
    for (const Lot& lot : buffers.queue(i)) {
      r.packets.push_back({lot.source, lot.gen, -1, lot.count});
      r.undelivered += lot.count;
    }
  std::sort(r.packets.begin(), r.packets.end(), [](const PacketRecord& a, const PacketRecord& b) {
    if (a.source != b.source) return a.source < b.source;
    if (a.generated_slot != b.generated_slot) return a.generated_slot < b.generated_slot;
    return (a.censored() ? 1 << 30 : a.delivered_slot) < (b.censored() ? 1 << 30 : b.delivered_slot);
  });
  detail::finish_averages(r, &state, opt.horizon_penalty, opt.repetitions * T);
  RangingAudit audit = ranging_audit(x, state, params.l_min);
  r.ranging_pass = audit.satisfied;
  r.ranging_partners = audit.partners;
  r.ranging_ok = audit.pass;
  std::size_t ok = 0;
  for (NodeIndex i : state.satellites()) ok += audit.satisfied[i] ? 1 : 0;
  if (!state.satellites().empty())
    r.ranging_pass_rate = static_cast<double>(ok) / static_cast<double>(state.satellites().size());
  return r;
}

// Packet-weighted merge of per-state reports (one algorithm).
inline EvaluationReport merge_reports(const std::vector<EvaluationReport>& parts) {
  EvaluationReport m;
  if (parts.empty()) return m;
  m.scenario = parts.front().scenario;
  m.algorithm = parts.front().algorithm;
  m.repetitions = parts.front().repetitions;
  double sum = 0, rate = 0;
  for (const auto& p : parts) {
    rate += p.ranging_pass_rate;
    m.generated += p.generated;
    m.delivered += p.delivered;
    m.undelivered += p.undelivered;
    m.max_delay = std::max(m.max_delay, p.max_delay);
    for (auto [d, c] : p.delay_histogram) m.delay_histogram[d] += c;
    m.violations.insert(m.violations.end(), p.violations.begin(), p.violations.end());
    m.age_weighted_buffer += p.age_weighted_buffer;
    m.buffered_volume += p.buffered_volume;
    m.ranging_ok = m.ranging_ok && p.ranging_ok;
    for (auto [k, v] : p.runtime_ms) m.runtime_ms[k] += v;
    sum += p.average_delay_slots * static_cast<double>(p.averaged);
    m.averaged += p.averaged;
  }
  m.ranging_pass_rate = rate / static_cast<double>(parts.size());
  m.average_delay_slots = m.averaged ? sum / static_cast<double>(m.averaged) : 0;
  return m;
}

}  // namespace gnsstopo
