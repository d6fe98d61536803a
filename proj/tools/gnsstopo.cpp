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

// gnsstopo: schedule, evaluate and compare link topologies for a scenario.
//
//   gnsstopo schedule --scenario s.json --algo hmwm --out runs/hmwm
//   gnsstopo evaluate --scenario s.json --schedules runs/hmwm --reps 5 --out reports/hmwm
//   gnsstopo compare reports/ilp reports/hmwm --out cmp
//   gnsstopo generate-synthetic --kind constellation --out big.json
//
// Exit codes: 0 success, 2 usage, 3 parse or validation error, 4 some state
// infeasible, 5 some state timed out without a schedule.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "gnsstopo/gnsstopo.hpp"

namespace fs = std::filesystem;
using namespace gnsstopo;

namespace {

enum Exit { ok = 0, usage = 2, parse = 3, infeasible = 4, timeout = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string scenario;
  std::string algo;
  std::string states;
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  int reps = 1;
  int workers = 1;
  bool tight_m = false;
  bool non_perfect = false;
  bool export_lp_only = false;
  bool horizon_penalty = false;
  double time_budget = 300;
  std::string schedules;
  std::string out;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

fs::path resolve_scenario(const std::string& given) {
  const char* dir = std::getenv("GNSSTOPO_SCENARIO_DIR");
  if (given.empty()) {
    if (!dir) throw UsageError("no --scenario given and GNSSTOPO_SCENARIO_DIR is unset");
    return fs::path(dir) / "test_scenario.json";
  }
  fs::path p(given);
  if (!fs::exists(p) && p.is_relative() && dir && fs::exists(fs::path(dir) / p)) return fs::path(dir) / p;
  return p;
}

Scenario load_config_scenario(const RunConfig& c) {
  Scenario sc = load_scenario(resolve_scenario(c.scenario));
  if (!c.overrides.empty()) {
    nlohmann::json j = params_to_json(sc.params);
    for (const auto& kv : c.overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      try {
        j[kv.substr(0, eq)] = nlohmann::json::parse(kv.substr(eq + 1));
      } catch (const nlohmann::json::exception&) {
        throw UsageError("bad value in --set " + kv);
      }
    }
    sc.params = params_from_json(j);
  }
  return sc;
}

// "a..b", "a" or empty for every state.
std::vector<const ScenarioState*> select_states(const Scenario& sc, const std::string& range) {
  std::vector<const ScenarioState*> out;
  if (range.empty()) {
    for (const auto& s : sc.states) out.push_back(&s);
    return out;
  }
  int lo, hi;
  try {
    auto dots = range.find("..");
    lo = std::stoi(range.substr(0, dots));
    hi = dots == std::string::npos ? lo : std::stoi(range.substr(dots + 2));
  } catch (const std::exception&) {
    throw UsageError("--states expects a..b, got '" + range + "'");
  }
  if (lo > hi) throw UsageError("--states range is empty");
  for (int k = lo; k <= hi; ++k) {
    try {
      out.push_back(&sc.state_by_index(k));
    } catch (const ValidationError&) {
      throw UsageError("state " + std::to_string(k) + " is not in the scenario");
    }
  }
  return out;
}

std::string state_file(int index, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%04d.%s", index, ext);
  return buf;
}

// Runs job(k) for k in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t k; (k = next++) < n;) job(k);
  };
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  std::vector<std::jthread> pool;
  for (int i = 1; i < w; ++i) pool.emplace_back(loop);
  loop();
}

struct StateOutcome {
  int index = 0;
  std::string status;
  std::optional<double> objective;
  double build_ms = 0, solve_ms = 0;
  std::string error;
};

StateOutcome schedule_one(const Scenario& sc, const ScenarioState& st, const RunConfig& c, const fs::path& out) {
  StateOutcome r;
  r.index = st.index();
  const TrafficProfile traffic = sc.traffic_for(st);
  const SystemParams params = c.tight_m ? sc.params.tightened(st.slot_count()) : sc.params;
  ScheduleFile file{sc.name, st.index(), c.algo, "feasible", std::nullopt, 0, {}};
  auto t0 = std::chrono::steady_clock::now();
  if (c.algo == "ilp" || c.algo == "railp") {
    IlpModel m = c.algo == "ilp" ? build_ilp(st, traffic, params) : build_railp(st, traffic, params);
    r.build_ms = ms_since(t0);
    if (c.export_lp_only) {
      export_lp(m, out / state_file(st.index(), "lp"));
      r.status = "exported";
      return r;
    }
    auto t1 = std::chrono::steady_clock::now();
    IlpSolution sol = solve_branch_and_bound(m, c.time_budget);
    r.solve_ms = ms_since(t1);
    r.status = to_string(sol.status);
    if (!sol.has_assignment()) return r;
    r.objective = sol.objective_value;
    file.objective = sol.objective_value;
    file.schedule = extract_topology(m, sol, st);
  } else if (c.algo == "hmwm") {
    params.validate(st.slot_count());
    HmwmOptions opt;
    if (c.non_perfect) opt.mode = MatchingMode::non_perfect;
    file.schedule = schedule_state_hmwm(st, traffic, params, opt).schedule;
    r.solve_ms = ms_since(t0);
    r.status = "feasible";
  } else {
    file.schedule = schedule_state_fcp(st, splitmix64(c.seed ^ static_cast<std::uint64_t>(st.index()))).schedule;
    r.solve_ms = ms_since(t0);
    r.status = "feasible";
  }
  file.status = r.status;
  file.runtime_ms = r.build_ms + r.solve_ms;
  save_schedule(out / state_file(st.index(), "json"), file, st);
  return r;
}

int cmd_schedule(const RunConfig& c) {
  static const std::vector<std::string> algos{"ilp", "railp", "hmwm", "fcp"};
  if (std::find(algos.begin(), algos.end(), c.algo) == algos.end())
    throw UsageError("unknown algorithm '" + c.algo + "' (expected ilp, railp, hmwm or fcp)");
  if (c.export_lp_only && c.algo != "ilp" && c.algo != "railp")
    throw UsageError("--export-lp-only needs --algo ilp or railp");
  const Scenario sc = load_config_scenario(c);
  const auto states = select_states(sc, c.states);
  const fs::path out(c.out);
  fs::create_directories(out);
  std::cerr << "gnsstopo: scenario " << sc.name << ", " << states.size() << " states, algo " << c.algo
            << ", seed " << c.seed << "\n";

  std::vector<StateOutcome> results(states.size());
  std::mutex log;
  parallel_for(states.size(), c.workers, [&](std::size_t k) {
    try {
      results[k] = schedule_one(sc, *states[k], c, out);
    } catch (const ValidationError& e) {
      results[k] = {states[k]->index(), "error", std::nullopt, 0, 0, e.what()};
    }
    std::lock_guard lock(log);
    std::cerr << "  state " << results[k].index << ": " << results[k].status
              << (results[k].error.empty() ? "" : " (" + results[k].error + ")") << "\n";
  });

  std::string csv = "state,algorithm,status,objective,build_ms,solve_ms,total_ms\n";
  int code = Exit::ok;
  for (const auto& r : results) {
    csv += std::to_string(r.index) + "," + c.algo + "," + r.status + "," + (r.objective ? fixed(*r.objective) : "") +
           "," + fixed(r.build_ms, 3) + "," + fixed(r.solve_ms, 3) + "," + fixed(r.build_ms + r.solve_ms, 3) + "\n";
    if (r.status == "error") code = std::max<int>(code, Exit::parse);
    if (r.status == "infeasible") code = std::max<int>(code, Exit::infeasible);
    if (r.status == "timeout") code = std::max<int>(code, Exit::timeout);
  }
  write_atomically(out / "timing.csv", csv);
  return code;
}

int cmd_evaluate(const RunConfig& c) {
  const Scenario sc = load_config_scenario(c);
  const auto states = select_states(sc, c.states);
  const fs::path in(c.schedules), out(c.out);
  fs::create_directories(out);
  std::vector<std::optional<EvaluationReport>> reports(states.size());
  std::vector<std::string> errors(states.size());
  parallel_for(states.size(), c.workers, [&](std::size_t k) {
    const ScenarioState& st = *states[k];
    try {
      ScheduleFile f = load_schedule(in / state_file(st.index(), "json"), st);
      auto t0 = std::chrono::steady_clock::now();
      EvaluationReport r = simulate(st, f.schedule, sc.traffic_for(st), sc.params, {c.reps, c.horizon_penalty});
      r.runtime_ms["simulate"] = ms_since(t0);
      r.runtime_ms["schedule"] = f.runtime_ms;
      r.scenario = sc.name;
      r.algorithm = f.algorithm;
      write_atomically(out / ("report_" + state_file(st.index(), "json")), report_to_json(r).dump(1) + "\n");
      reports[k] = std::move(r);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });
  std::vector<EvaluationReport> good;
  nlohmann::json errs = nlohmann::json::array();
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (reports[k]) good.push_back(std::move(*reports[k]));
    else errs.push_back({{"state", states[k]->index()}, {"error", errors[k]}});
  }
  for (const auto& e : errs) std::cerr << "  state " << e["state"] << ": " << e["error"].get<std::string>() << "\n";
  EvaluationReport agg = merge_reports(good);
  agg.scenario = sc.name;
  nlohmann::json j = report_to_json(agg);
  j["states_evaluated"] = good.size();
  j["errors"] = errs;
  write_atomically(out / "aggregate.json", j.dump(1) + "\n");
  write_atomically(out / "cdf.csv", cdf_csv(agg));
  std::cout << agg.algorithm << ": average delay " << fixed(agg.average_delay_slots, 4) << " slots over "
            << agg.averaged << " packets, " << agg.undelivered << " undelivered\n";
  return good.empty() ? Exit::parse : Exit::ok;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out_dir) {
  if (inputs.empty()) throw UsageError("compare needs at least one report directory");
  std::vector<EvaluationReport> rows;
  for (const auto& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) p /= "aggregate.json";
    rows.push_back(load_report(p));
  }
  Comparison cmp = compare(std::move(rows));
  if (cmp.scenario_mismatch) std::cerr << "gnsstopo: warning: reports come from different scenarios\n";
  const fs::path out(out_dir);
  write_atomically(out / "comparison.csv", comparison_csv(cmp));
  write_atomically(out / "comparison.json", comparison_json(cmp).dump(1) + "\n");
  write_atomically(out / "cdf.csv", comparison_cdf_csv(cmp));
  std::cout << comparison_csv(cmp);
  return Exit::ok;
}

int cmd_generate(const std::string& kind, const RandomScenarioOptions& ro, const ConstellationOptions& co,
                 const std::string& out) {
  Scenario sc;
  if (kind == "constellation") sc = constellation_scenario(co);
  else if (kind == "random") sc = random_scenario(ro);
  else throw UsageError("unknown synthetic kind '" + kind + "'");
  write_atomically(out, scenario_to_json(sc).dump() + "\n");
  std::cerr << "gnsstopo: wrote " << sc.states.size() << " states, " << sc.nodes.size() << " nodes to " << out << "\n";
  return Exit::ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link topology design for time-slotted satellite networks"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* s) {
    s->add_option("--scenario", cfg.scenario, "Scenario JSON (default: $GNSSTOPO_SCENARIO_DIR/test_scenario.json)");
    s->add_option("--states", cfg.states, "State range a..b (default: all)");
    s->add_option("--set", cfg.overrides, "Parameter override key=value, repeatable");
    s->add_option("--workers", cfg.workers, "Parallel workers")->check(CLI::PositiveNumber);
  };

  auto* sched = app.add_subcommand("schedule", "Design a topology for each state");
  common(sched);
  sched->add_option("--algo", cfg.algo, "ilp, railp, hmwm or fcp")->required();
  sched->add_option("--seed", cfg.seed, "Seed for the FCP slot shuffle");
  sched->add_flag("--tight-m", cfg.tight_m, "Use the smallest safe big-M constants");
  sched->add_flag("--non-perfect", cfg.non_perfect, "HMWM: maximum-weight instead of perfect-preferred matching");
  sched->add_flag("--export-lp-only", cfg.export_lp_only, "Write LP files without solving");
  sched->add_option("--time-budget", cfg.time_budget, "Solver budget per state in seconds");
  sched->add_option("--out", cfg.out, "Output directory")->required();

  auto* eval = app.add_subcommand("evaluate", "Simulate schedules and write reports");
  common(eval);
  eval->add_option("--schedules", cfg.schedules, "Directory of schedule files")->required();
  eval->add_option("--reps", cfg.reps, "Schedule repetitions")->check(CLI::PositiveNumber);
  eval->add_flag("--horizon-penalty", cfg.horizon_penalty, "Charge undelivered packets up to the horizon");
  eval->add_option("--out", cfg.out, "Output directory")->required();

  std::vector<std::string> inputs;
  std::string cmp_out = ".";
  auto* cmp = app.add_subcommand("compare", "Tabulate evaluation reports");
  cmp->add_option("reports", inputs, "Report directories or aggregate JSON files");
  cmp->add_option("--out", cmp_out, "Output directory");

  std::string kind = "constellation", gen_out;
  RandomScenarioOptions ro;
  ConstellationOptions co;
  auto* gen = app.add_subcommand("generate-synthetic", "Write a synthetic scenario");
  gen->add_option("--kind", kind, "constellation or random");
  gen->add_option("--states", co.states, "Number of states");
  gen->add_option("--slots", co.slots, "Slots per state");
  gen->add_option("--satellites", ro.satellites, "random: satellite count");
  gen->add_option("--p-ss", ro.p_ss, "random: satellite pair visibility probability");
  gen->add_option("--p-sg", ro.p_sg, "random: satellite-station visibility probability");
  gen->add_option("--seed", ro.seed, "random: seed");
  gen->add_option("--out", gen_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Exit::usage;
  }
  try {
    if (*sched) return cmd_schedule(cfg);
    if (*eval) return cmd_evaluate(cfg);
    if (*cmp) return cmd_compare(inputs, cmp_out);
    ro.states = co.states;
    ro.slots = co.slots;
    return cmd_generate(kind, ro, co, gen_out);
  } catch (const UsageError& e) {
    std::cerr << "gnsstopo: " << e.what() << "\n";
    return Exit::usage;
  } catch (const ParseError& e) {
    std::cerr << "gnsstopo: " << e.what() << "\n";
    return Exit::parse;
  } catch (const ValidationError& e) {
    std::cerr << "gnsstopo: " << e.what() << "\n";
    return Exit::parse;
  } catch (const std::exception& e) {
    std::cerr << "gnsstopo: error: " << e.what() << "\n";
    return 1;
  }
}
