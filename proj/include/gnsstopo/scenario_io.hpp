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

// Scenario files: JSON documents holding the node list, one or more
// fixed-visibility states, the traffic description and system parameters.
//
//   {
//     "name": "test",
//     "nodes": [{"name": "v1", "kind": "satellite"},
//               {"name": "GS1", "kind": "ground_station", "antennas": 2}],
//     "states": [{"index": 1, "slots": 6, "visibility": [[0, 1], [1, 0]]},
//                {"index": 2, "slots": 6, "edges": [["v1", "GS1/1"]]}],
//     "traffic": {"f_td": 6, "f_sm": 4, "service_nodes": ["v1"]},
//     "params": {"l_min": 2, "b_max": 150, ...}
//   }
//
// A "ground_station" entry with k antennas expands to k "gs_antenna" nodes
// named "<name>/1" .. "<name>/k"; "gs_antenna" nodes may also be listed
// directly with an optional "gs_group". Visibility matrices index the
// expanded node list. "traffic.packets" optionally maps node names to
// explicit per-slot counts; it is only valid when all states share one slot
// count.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gnsstopo/scenario.hpp"
#include "json.hpp"

namespace gnsstopo {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrafficSpec {
  Packets f_td = 0;
  Packets f_sm = 0;
  std::vector<std::string> service_nodes;
  std::map<std::string, std::vector<Packets>> packets;  // explicit override
};

struct Scenario {
  std::string name;
  std::vector<Node> nodes;
  std::vector<ScenarioState> states;
  TrafficSpec traffic;
  SystemParams params;

  // Traffic matrix for one state under this scenario's traffic spec.
  TrafficProfile traffic_for(const ScenarioState& state) const {
    if (!traffic.packets.empty()) {
      std::vector<std::vector<Packets>> rows(state.node_count(), std::vector<Packets>(state.slot_count(), 0));
      for (const auto& [name, row] : traffic.packets) {
        auto idx = state.find(name);
        if (!idx) throw ValidationError("traffic names unknown node '" + name + "'");
        if (static_cast<int>(row.size()) != state.slot_count())
          throw ValidationError("traffic for '" + name + "' has " + std::to_string(row.size()) +
                                " slots, state has " + std::to_string(state.slot_count()));
        rows[*idx] = row;
      }
      return TrafficProfile(state, std::move(rows));
    }
    std::vector<bool> service(state.node_count(), false);
    for (const auto& name : traffic.service_nodes) {
      auto idx = state.find(name);
      if (!idx) throw ValidationError("service node '" + name + "' is not defined");
      if (!state.is_satellite(*idx)) throw ValidationError("service node '" + name + "' is not a satellite");
      service[*idx] = true;
    }
    return TrafficProfile(state, traffic.f_td, traffic.f_sm, std::move(service));
  }

  const ScenarioState& state_by_index(int index) const {
    for (const auto& s : states)
      if (s.index() == index) return s;
    throw ValidationError("scenario has no state " + std::to_string(index));
  }
};

inline SystemParams params_from_json(const nlohmann::json& j) {
  SystemParams p;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("l_min", p.l_min);
  get("b_max", p.b_max);
  get("c_ss", p.c_ss);
  get("c_sg", p.c_sg);
  get("gamma", p.gamma);
  get("eta", p.eta);
  get("alpha", p.alpha);
  get("beta", p.beta);
  get("q", p.q);
  get("m_dot", p.m_dot);
  get("m_big", p.m_big);
  get("m_bar", p.m_bar);
  get("m_tilde", p.m_tilde);
  get("gs_antennas", p.gs_antennas);
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"l_min", "b_max", "c_ss", "c_sg", "gamma", "eta", "alpha",
                                  "beta", "q", "m_dot", "m_big", "m_bar", "m_tilde", "gs_antennas"};
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
      throw ParseError("unknown parameter '" + it.key() + "'");
  }
  return p;
}

namespace detail {

inline std::vector<Node> nodes_from_json(const nlohmann::json& arr) {
  std::vector<Node> nodes;
  for (const auto& n : arr) {
    std::string name = n.at("name").get<std::string>();
    std::string kind = n.value("kind", std::string("satellite"));
    if (kind == "satellite") {
      nodes.push_back({name, NodeKind::satellite, ""});
    } else if (kind == "gs_antenna") {
      nodes.push_back({name, NodeKind::gs_antenna, n.value("gs_group", name)});
    } else if (kind == "ground_station") {
      int k = n.value("antennas", 1);
      if (k < 1) throw ParseError("ground station '" + name + "' needs at least one antenna");
      for (int a = 1; a <= k; ++a)
        nodes.push_back({name + "/" + std::to_string(a), NodeKind::gs_antenna, name});
    } else {
      throw ParseError("node '" + name + "' has unknown kind '" + kind + "'");
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (nodes[i].name == nodes[j].name) throw ParseError("duplicate node name '" + nodes[i].name + "'");
  return nodes;
}

inline BinaryMatrix visibility_from_json(const nlohmann::json& s, const std::vector<Node>& nodes) {
  const std::size_t n = nodes.size();
  BinaryMatrix y(n);
  if (s.contains("visibility")) {
    const auto& rows = s.at("visibility");
    if (rows.size() != n)
      throw ParseError("visibility has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n)
        throw ParseError("visibility row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                         " entries, expected " + std::to_string(n));
      for (std::size_t j = 0; j < n; ++j) {
        int v = rows[i][j].get<int>();
        if (v < 0 || v > 255) throw ParseError("visibility entry out of range");
        y(i, j) = static_cast<std::uint8_t>(v);
      }
    }
  } else if (s.contains("edges")) {
    auto index_of = [&](const std::string& name) {
      for (std::size_t i = 0; i < n; ++i)
        if (nodes[i].name == name) return i;
      throw ParseError("edge references unknown node '" + name + "'");
    };
    for (const auto& e : s.at("edges")) {
      if (e.size() != 2) throw ParseError("edge entries must be name pairs");
      std::size_t a = index_of(e[0].get<std::string>()), b = index_of(e[1].get<std::string>());
      if (a == b) throw ValidationError("edge from '" + nodes[a].name + "' to itself");
      y.set_symmetric(a, b, 1);
    }
  } else {
    throw ParseError("state needs 'visibility' or 'edges'");
  }
  return y;
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& doc) {
  Scenario sc;
  try {
    sc.name = doc.value("name", std::string("scenario"));
    sc.nodes = detail::nodes_from_json(doc.at("nodes"));
    if (doc.contains("params")) sc.params = params_from_json(doc.at("params"));
    if (doc.contains("traffic")) {
      const auto& t = doc.at("traffic");
      sc.traffic.f_td = t.value("f_td", Packets{0});
      sc.traffic.f_sm = t.value("f_sm", Packets{0});
      if (t.contains("service_nodes")) sc.traffic.service_nodes = t.at("service_nodes").get<std::vector<std::string>>();
      if (t.contains("packets"))
        sc.traffic.packets = t.at("packets").get<std::map<std::string, std::vector<Packets>>>();
    }
    int next_index = 1;
    for (const auto& s : doc.at("states")) {
      int index = s.value("index", next_index);
      int slots = s.at("slots").get<int>();
      BinaryMatrix y = detail::visibility_from_json(s, sc.nodes);
      try {
        sc.states.emplace_back(index, slots, sc.nodes, std::move(y));
      } catch (const ValidationError& e) {
        throw ValidationError("state " + std::to_string(index) + ": " + e.what());
      }
      next_index = index + 1;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
  for (const auto& s : sc.states) sc.params.validate(s.slot_count());
  for (const auto& s : sc.states) (void)sc.traffic_for(s);
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

inline nlohmann::json params_to_json(const SystemParams& p) {
  return {{"l_min", p.l_min}, {"b_max", p.b_max}, {"c_ss", p.c_ss},   {"c_sg", p.c_sg},
          {"gamma", p.gamma}, {"eta", p.eta},     {"alpha", p.alpha}, {"beta", p.beta},
          {"q", p.q},         {"m_dot", p.m_dot}, {"m_big", p.m_big}, {"m_bar", p.m_bar},
          {"m_tilde", p.m_tilde}, {"gs_antennas", p.gs_antennas}};
}

// Writes states as edge lists, which keeps large files compact.
inline nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json doc;
  doc["name"] = sc.name;
  doc["nodes"] = nlohmann::json::array();
  for (const auto& n : sc.nodes) {
    nlohmann::json j{{"name", n.name}, {"kind", n.kind == NodeKind::satellite ? "satellite" : "gs_antenna"}};
    if (n.kind == NodeKind::gs_antenna) j["gs_group"] = n.gs_group;
    doc["nodes"].push_back(j);
  }
  doc["states"] = nlohmann::json::array();
  for (const auto& s : sc.states) {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : s.visible_pairs()) edges.push_back({sc.nodes[e.u].name, sc.nodes[e.v].name});
    doc["states"].push_back({{"index", s.index()}, {"slots", s.slot_count()}, {"edges", edges}});
  }
  doc["traffic"] = {{"f_td", sc.traffic.f_td}, {"f_sm", sc.traffic.f_sm}, {"service_nodes", sc.traffic.service_nodes}};
  if (!sc.traffic.packets.empty()) doc["traffic"]["packets"] = sc.traffic.packets;
  doc["params"] = params_to_json(sc.params);
  return doc;
}

}  // namespace gnsstopo
