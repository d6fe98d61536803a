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

// File formats for schedules, evaluation reports and comparison tables.
//
// Schedule JSON:
//   {"scenario": "test-8", "state": 1, "algorithm": "hmwm", "slots": 6,
//    "status": "optimal", "objective": 262, "runtime_ms": 3.1,
//    "links": [[["v1", "v2"], ["v3", "v6"]], ...]}   one list per slot
//
// CSV output uses fixed six-digit precision so files diff cleanly.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gnsstopo/scenario_io.hpp"
#include "gnsstopo/simulator.hpp"
#include "json.hpp"

namespace gnsstopo {

struct ScheduleFile {
  std::string scenario;
  int state = 0;
  std::string algorithm;
  std::string status = "feasible";
  std::optional<double> objective;
  double runtime_ms = 0;
  TopologySchedule schedule;
};

inline std::string fixed(double v, int digits = 6) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

// Writes through a sibling temporary so readers never see partial files.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline nlohmann::json schedule_to_json(const ScheduleFile& f, const ScenarioState& state) {
  nlohmann::json links = nlohmann::json::array();
  for (int t = 0; t < f.schedule.slot_count(); ++t) {
    nlohmann::json slot = nlohmann::json::array();
    for (const Edge& e : f.schedule.links(t)) slot.push_back({state.nodes()[e.u].name, state.nodes()[e.v].name});
    links.push_back(slot);
  }
  nlohmann::json j{{"scenario", f.scenario}, {"state", f.state},         {"algorithm", f.algorithm},
                   {"slots", f.schedule.slot_count()}, {"status", f.status}, {"runtime_ms", f.runtime_ms},
                   {"links", links}};
  j["objective"] = f.objective ? nlohmann::json(*f.objective) : nlohmann::json(nullptr);
  return j;
}

inline ScheduleFile schedule_from_json(const nlohmann::json& j, const ScenarioState& state) {
  ScheduleFile f;
  try {
    f.scenario = j.value("scenario", "");
    f.state = j.at("state").get<int>();
    f.algorithm = j.value("algorithm", "");
    f.status = j.value("status", "feasible");
    f.runtime_ms = j.value("runtime_ms", 0.0);
    if (j.contains("objective") && !j["objective"].is_null()) f.objective = j["objective"].get<double>();
    const int slots = j.at("slots").get<int>();
    if (slots != state.slot_count())
      throw ParseError("schedule has " + std::to_string(slots) + " slots, state has " +
                       std::to_string(state.slot_count()));
    const auto& links = j.at("links");
    if (!links.is_array() || static_cast<int>(links.size()) != slots)
      throw ParseError("schedule 'links' must hold one list per slot");
    f.schedule = TopologySchedule(state.node_count(), slots);
    for (int t = 0; t < slots; ++t)
      for (const auto& pair : links[t]) {
        auto a = state.find(pair.at(0).get<std::string>());
        auto b = state.find(pair.at(1).get<std::string>());
        if (!a || !b) throw ParseError("schedule names an unknown node in slot " + std::to_string(t + 1));
        f.schedule.link(*a, *b, t);
      }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed schedule: ") + e.what());
  }
  return f;
}

inline void save_schedule(const std::filesystem::path& path, const ScheduleFile& f, const ScenarioState& state) {
  write_atomically(path, schedule_to_json(f, state).dump(1) + "\n");
}

inline ScheduleFile load_schedule(const std::filesystem::path& path, const ScenarioState& state) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return schedule_from_json(j, state);
}

inline nlohmann::json report_to_json(const EvaluationReport& r, bool with_packets = false) {
  nlohmann::json j{{"scenario", r.scenario},
                   {"algorithm", r.algorithm},
                   {"state", r.state_index},
                   {"repetitions", r.repetitions},
                   {"generated", r.generated},
                   {"delivered", r.delivered},
                   {"undelivered", r.undelivered},
                   {"average_delay_slots", r.average_delay_slots},
                   {"averaged_packets", r.averaged},
                   {"average_delay_non_anchor", r.average_delay_non_anchor},
                   {"average_delay_anchor", r.average_delay_anchor},
                   {"max_delay", r.max_delay},
                   {"buffer_peak", r.buffer_peak},
                   {"ranging_partners", r.ranging_partners},
                   {"ranging_ok", r.ranging_ok},
                   {"ranging_pass_rate", r.ranging_pass_rate},
                   {"age_weighted_buffer", r.age_weighted_buffer},
                   {"buffer_violations", r.violations.size()},
                   {"runtime_ms", r.runtime_ms}};
  std::vector<bool> pass(r.ranging_pass.begin(), r.ranging_pass.end());
  j["ranging_pass"] = pass;
  nlohmann::json hist = nlohmann::json::object();
  for (auto [d, n] : r.delay_histogram) hist[std::to_string(d)] = n;
  j["delay_histogram"] = hist;
  nlohmann::json cdf = nlohmann::json::array();
  for (auto [d, f] : r.cdf()) cdf.push_back({d, f});
  j["cdf"] = cdf;
  if (with_packets) {
    nlohmann::json p = nlohmann::json::array();
    for (const auto& rec : r.packets)
      p.push_back({rec.source, rec.generated_slot, rec.censored() ? nlohmann::json(nullptr) : nlohmann::json(rec.delivered_slot),
                   rec.count});
    j["packets"] = p;
  }
  return j;
}

// Reads the summary fields back; packet records are not restored.
inline EvaluationReport report_from_json(const nlohmann::json& j) {
  EvaluationReport r;
  try {
    r.scenario = j.value("scenario", "");
    r.algorithm = j.value("algorithm", "");
    r.state_index = j.value("state", 0);
    r.repetitions = j.value("repetitions", 1);
    r.generated = j.at("generated").get<Packets>();
    r.delivered = j.at("delivered").get<Packets>();
    r.undelivered = j.at("undelivered").get<Packets>();
    r.average_delay_slots = j.at("average_delay_slots").get<double>();
    r.averaged = j.value("averaged_packets", r.delivered);
    r.max_delay = j.value("max_delay", 0);
    r.ranging_ok = j.value("ranging_ok", true);
    r.ranging_pass_rate = j.value("ranging_pass_rate", 1.0);
    r.age_weighted_buffer = j.value("age_weighted_buffer", Packets{0});
    if (j.contains("ranging_pass"))
      for (bool b : j["ranging_pass"]) r.ranging_pass.push_back(b);
    if (j.contains("delay_histogram"))
      for (auto it = j["delay_histogram"].begin(); it != j["delay_histogram"].end(); ++it)
        r.delay_histogram[std::stoi(it.key())] = it.value().get<Packets>();
    if (j.contains("runtime_ms")) r.runtime_ms = j["runtime_ms"].get<std::map<std::string, double>>();
  } catch (const std::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  return r;
}

inline EvaluationReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return report_from_json(j);
}

inline std::string cdf_csv(const EvaluationReport& r) {
  std::string out = "delay_slots,fraction\n";
  for (auto [d, f] : r.cdf()) out += std::to_string(d) + "," + fixed(f) + "\n";
  return out;
}

struct Comparison {
  std::vector<EvaluationReport> rows;
  bool scenario_mismatch = false;
};

inline Comparison compare(std::vector<EvaluationReport> reports) {
  if (reports.empty()) throw std::invalid_argument("compare needs at least one report");
  Comparison c;
  for (const auto& r : reports)
    if (r.scenario != reports.front().scenario) c.scenario_mismatch = true;
  c.rows = std::move(reports);
  return c;
}

inline std::string comparison_csv(const Comparison& c) {
  std::string out =
      "algorithm,scenario,average_delay_slots,max_delay,generated,delivered,undelivered,ranging_pass_rate,"
      "runtime_ms,scenario_mismatch\n";
  for (const auto& r : c.rows) {
    double ms = 0;
    for (auto [k, v] : r.runtime_ms) ms += v;
    out += r.algorithm + "," + r.scenario + "," + fixed(r.average_delay_slots) + "," + std::to_string(r.max_delay) +
           "," + std::to_string(r.generated) + "," + std::to_string(r.delivered) + "," +
           std::to_string(r.undelivered) + "," + fixed(r.ranging_pass_rate) + "," + fixed(ms, 3) + "," +
           (c.scenario_mismatch ? "1" : "0") + "\n";
  }
  return out;
}

// Long-format CDF points for plotting: algorithm,delay_slots,fraction.
inline std::string comparison_cdf_csv(const Comparison& c) {
  std::string out = "algorithm,delay_slots,fraction\n";
  for (const auto& r : c.rows)
    for (auto [d, f] : r.cdf()) out += r.algorithm + "," + std::to_string(d) + "," + fixed(f) + "\n";
  return out;
}

inline nlohmann::json comparison_json(const Comparison& c) {
  nlohmann::json j{{"scenario_mismatch", c.scenario_mismatch}, {"rows", nlohmann::json::array()}};
  for (const auto& r : c.rows) {
    j["rows"].push_back(report_to_json(r));
  }
  return j;
}

}  // namespace gnsstopo
