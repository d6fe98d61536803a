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

// Solver-neutral integer program container with a CPLEX-LP writer and a
// plain `name value` solution reader.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gnsstopo/scenario.hpp"

namespace gnsstopo {

enum class VarKind { binary, integer };
enum class Sense { le, ge, eq };
enum class ObjectiveSense { minimize, maximize };

struct Variable {
  std::string name;
  VarKind kind = VarKind::binary;
  double lower = 0;
  double upper = 1;  // +inf for unbounded integers
};

struct Term {
  int var = 0;
  double coef = 0;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0;
};

enum class ModelKind { ilp, railp };

// What a model was built from. Lets the internal solver exploit structure
// and lets extraction map names back to nodes.
struct ModelSource {
  ModelKind kind;
  ScenarioState state;
  TrafficProfile traffic;
  SystemParams params;
};

class IlpModel {
 public:
  int add_variable(std::string name, VarKind kind, double lower = 0,
                   double upper = std::numeric_limits<double>::infinity()) {
    if (kind == VarKind::binary) {
      lower = 0;
      upper = 1;
    }
    if (index_.count(name)) throw std::logic_error("duplicate variable " + name);
    int id = static_cast<int>(vars_.size());
    index_.emplace(name, id);
    vars_.push_back({std::move(name), kind, lower, upper});
    return id;
  }

  void add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    for (const Term& t : terms)
      if (t.var < 0 || t.var >= static_cast<int>(vars_.size()))
        throw std::logic_error("constraint " + name + " references an undeclared variable");
    constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
  }

  void set_objective(ObjectiveSense sense, std::vector<Term> terms) {
    sense_ = sense;
    objective_ = std::move(terms);
  }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  ObjectiveSense sense() const { return sense_; }
  std::optional<int> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t count(VarKind kind) const {
    std::size_t n = 0;
    for (const auto& v : vars_) n += v.kind == kind;
    return n;
  }

  // Variables whose name starts with `prefix` followed by '_'.
  std::size_t count_prefix(const std::string& prefix) const {
    std::size_t n = 0;
    for (const auto& v : vars_) n += v.name.size() > prefix.size() && v.name.compare(0, prefix.size(), prefix) == 0 &&
                                     v.name[prefix.size()] == '_';
    return n;
  }

  double evaluate_objective(const std::vector<std::int64_t>& values) const {
    double s = 0;
    for (const Term& t : objective_) s += t.coef * static_cast<double>(values.at(t.var));
    return s;
  }

  std::shared_ptr<const ModelSource> source;
  std::vector<std::string> comments;  // written as header lines in LP exports

 private:
  std::vector<Variable> vars_;
  std::unordered_map<std::string, int> index_;
  std::vector<LinearConstraint> constraints_;
  std::vector<Term> objective_;
  ObjectiveSense sense_ = ObjectiveSense::minimize;
};

enum class SolveStatus { optimal, feasible, feasible_timeout, infeasible, timeout };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::feasible_timeout: return "feasible_timeout";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::timeout: return "timeout";
  }
  return "?";
}

struct IncumbentEvent {
  double seconds = 0;
  double objective = 0;
};

struct IlpSolution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<std::int64_t> values;  // indexed like IlpModel::variables()
  double objective_value = 0;
  // Proven bound on the optimum (lower for minimisation, upper for
  // maximisation). Equals the objective when optimal.
  double bound = 0;
  std::vector<IncumbentEvent> incumbents;
  std::uint64_t nodes_explored = 0;
  double seconds = 0;

  bool has_assignment() const {
    return status == SolveStatus::optimal || status == SolveStatus::feasible ||
           status == SolveStatus::feasible_timeout;
  }

  std::int64_t value(const IlpModel& model, const std::string& name) const {
    auto id = model.find(name);
    if (!id) throw std::out_of_range("no variable named " + name);
    return values.at(*id);
  }
};

// Names of constraints (and variable bounds) violated by `values`.
inline std::vector<std::string> check_assignment(const IlpModel& model, const std::vector<std::int64_t>& values,
                                                 double tol = 1e-9) {
  std::vector<std::string> bad;
  if (values.size() != model.variables().size()) {
    bad.push_back("assignment size mismatch");
    return bad;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& v = model.variables()[i];
    double x = static_cast<double>(values[i]);
    if (x < v.lower - tol || x > v.upper + tol) bad.push_back("bound:" + v.name);
  }
  for (const auto& c : model.constraints()) {
    double lhs = 0;
    for (const Term& t : c.terms) lhs += t.coef * static_cast<double>(values[t.var]);
    bool ok = c.sense == Sense::le ? lhs <= c.rhs + tol : c.sense == Sense::ge ? lhs >= c.rhs - tol
                                                                               : std::fabs(lhs - c.rhs) <= tol;
    if (!ok) bad.push_back(c.name);
  }
  return bad;
}

namespace detail {

inline std::string format_number(double v) {
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_expression(std::ostream& out, const IlpModel& model, const std::vector<Term>& terms) {
  if (terms.empty()) {
    out << " 0";
    return;
  }
  int on_line = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Term& t = terms[k];
    double c = t.coef;
    out << (c < 0 ? " - " : (k == 0 ? " " : " + "));
    double a = std::fabs(c);
    if (a != 1) out << format_number(a) << ' ';
    out << model.variables()[t.var].name;
    if (++on_line == 8 && k + 1 < terms.size()) {
      out << "\n   ";
      on_line = 0;
    }
  }
}

}  // namespace detail

inline void write_lp(std::ostream& out, const IlpModel& model) {
  for (const auto& c : model.comments) out << "\\ " << c << '\n';
  out << (model.sense() == ObjectiveSense::minimize ? "Minimize\n" : "Maximize\n");
  out << " obj:";
  if (model.objective().empty() && !model.variables().empty()) {
    out << " 0 " << model.variables().front().name;
  } else {
    detail::write_expression(out, model, model.objective());
  }
  out << "\nSubject To\n";
  for (const auto& c : model.constraints()) {
    out << ' ' << c.name << ':';
    detail::write_expression(out, model, c.terms);
    out << (c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = ") << detail::format_number(c.rhs)
        << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : model.variables()) {
    if (v.kind != VarKind::integer) continue;
    if (std::isinf(v.upper)) {
      if (v.lower != 0) out << ' ' << v.name << " >= " << detail::format_number(v.lower) << '\n';
    } else {
      out << ' ' << detail::format_number(v.lower) << " <= " << v.name << " <= " << detail::format_number(v.upper)
          << '\n';
    }
  }
  auto section = [&](const char* title, VarKind kind) {
    if (model.count(kind) == 0) return;
    out << title << '\n';
    int on_line = 0;
    for (const auto& v : model.variables()) {
      if (v.kind != kind) continue;
      out << ' ' << v.name;
      if (++on_line == 10) {
        out << '\n';
        on_line = 0;
      }
    }
    if (on_line) out << '\n';
  };
  section("Binary", VarKind::binary);
  section("General", VarKind::integer);
  out << "End\n";
}

// Writes through a temporary file so readers never see partial output.
inline void export_lp(const IlpModel& model, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    write_lp(out, model);
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// Reads `name value` lines (blank lines and '#' comments ignored). Values
// must be integral within 1e-6; missing variables default to 0.
inline std::vector<std::int64_t> read_solution(std::istream& in, const IlpModel& model) {
  std::vector<std::int64_t> values(model.variables().size(), 0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string name;
    double value;
    if (!(ls >> name)) continue;
    if (!(ls >> value)) throw std::runtime_error("solution line " + std::to_string(lineno) + ": missing value");
    auto id = model.find(name);
    if (!id) throw std::runtime_error("solution line " + std::to_string(lineno) + ": unknown variable " + name);
    double r = std::round(value);
    if (std::fabs(r - value) > 1e-6)
      throw std::runtime_error("solution line " + std::to_string(lineno) + ": non-integral value for " + name);
    values[*id] = static_cast<std::int64_t>(r);
  }
  return values;
}

inline std::vector<std::int64_t> read_solution(const std::filesystem::path& path, const IlpModel& model) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file " + path.string());
  return read_solution(in, model);
}

}  // namespace gnsstopo
